//! Rewrites the shipped studies in `data/` from the synthetic generators.
//!
//!     cargo run --example regenerate_data

use std::path::Path;

use flexplan::io::write_study;
use flexplan::synthetic;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (stem, (config, series)) in [("toy", synthetic::toy()), ("case", synthetic::case_study())] {
        let path = write_study(&dir, stem, &config, &series).expect("write study");
        println!("{}", path.display());
    }
}
