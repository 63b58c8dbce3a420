mod common;

use common::micro::*;
use flexplan::formulation::{VarKey, VarKind};
use flexplan::lp::{check_feasibility, Status};
use flexplan::synthetic::{case_study, desk_study, study_of, toy};
use flexplan::system::{Storage, Technology};
use flexplan::tree::NodeId;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + b.abs())
}

fn day_ahead(s: &mut flexplan::study::Study, prices: &[f64]) {
    s.system.market.day_ahead = true;
    each_node(s, |d| d.price_da = prices.to_vec());
}

fn da_buy(h: usize) -> VarKey {
    VarKey::new(VarKind::DaBuy).node(NodeId(0)).step(h)
}

fn storage_key(kind: VarKind, node: usize, t: usize) -> VarKey {
    VarKey::new(kind).node(NodeId(node)).step(t).obj(0)
}

#[test]
fn storage_columns_per_step() {
    let mut s = single(2);
    add_storage(&mut s, storage("EL"));
    let m = build(&s);
    assert_eq!(m.count(VarKind::Charge), 2);
    assert_eq!(m.count(VarKind::Discharge), 2);
    assert_eq!(m.count(VarKind::Soc), 2);
}

#[test]
fn sibling_leaves_share_one_set_of_bids() {
    let mut s = micro(2, &[vec![0.5, 0.5]], 0);
    s.system.technologies[0].v_init = 10.0;
    s.system.market.day_ahead = true;
    let m = build(&s);
    assert_eq!(m.count(VarKind::DaBuy), 2);
    assert_eq!(m.count(VarKind::DaSell), 2);
    assert_eq!(
        m.cols_of(VarKind::Out)
            .filter(|&j| m.keys[j].obj == Some(0))
            .count(),
        4
    );
    for t in 0..2 {
        let bid = m.col(&da_buy(t)).unwrap();
        for node in [1, 2] {
            let r = row(&m, &format!("imp[node={node},t={t}]"));
            assert_eq!(row_terms(&m, r).get(&bid), Some(&-1.0));
        }
    }
}

#[test]
fn case_study_column_count() {
    let (c, series) = case_study();
    let m = build(&study_of(&c, &series).unwrap());
    // 3 candidate technologies and 3 candidate storages.
    let investment = 6;
    // 4 bidding days, 24 hours, DA/ID/reserve in both directions.
    let bids = 4 * 24 * 6;
    // Per operational node and hour: 10 modes, 10 positive outputs, 7 positive
    // inputs, 3 storages with 3 states, 2 shiftable carriers with 2 directions.
    let per_step = 10 + 10 + 7 + 3 * 3 + 2 * 2;
    // Per operational node: peak plus 2 carriers with 2 aggregates.
    let per_node = 1 + 2 * 2;
    let expected = investment + bids + 8 * (24 * per_step + per_node);
    assert_eq!(expected, 8302);
    assert_eq!(m.keys.len(), expected);
    assert_eq!(m.problem.n_cols(), expected);
}

#[test]
fn zero_prices_and_demand_cost_nothing() {
    let mut s = single(3);
    s.system.market = Default::default();
    s.system.technologies[0].v_init = 10.0;
    let (m, sol) = run_optimal(&s);
    assert!(sol.objective.abs() < 1e-9);
    let c = m.decompose_costs(&sol).unwrap();
    for (_, v) in c.terms() {
        assert!(v.abs() < 1e-9);
    }
}

#[test]
fn forced_day_ahead_import() {
    let mut s = single(1);
    s.system.technologies[0].v_init = 20.0;
    s.system.market.grid_tariff_power = 100.0;
    set_demand(&mut s, "EL", &[10.0]);
    day_ahead(&mut s, &[50.0]);
    let (m, sol) = run_optimal(&s);
    assert!(
        close(sol.objective, 500.0 + 100.0 * 10.0),
        "{}",
        sol.objective
    );
    assert!(close(value(&m, &sol.primal, da_buy(0)), 10.0));
}

#[test]
fn capacity_market_books_full_bids() {
    let mut s = single(2);
    s.system.market.reserve = true;
    s.system.market.x_max = 5.0;
    each_node(&mut s, |d| {
        d.price_cm_up = vec![3.0; 2];
        d.price_cm_dwn = vec![2.0; 2];
    });
    let (m, sol) = run_optimal(&s);
    assert!(close(sol.objective, -(3.0 + 2.0) * 5.0 * 2.0));
    for h in 0..2 {
        for kind in [VarKind::Up, VarKind::Dwn] {
            assert!(close(
                value(&m, &sol.primal, VarKey::new(kind).node(NodeId(0)).step(h)),
                5.0
            ));
        }
    }
    assert!(m.decompose_costs(&sol).unwrap().capacity < 0.0);
}

#[test]
fn unconnected_carrier_is_rejected_before_building() {
    let mut s = single(2);
    ensure_carrier(&mut s, "HEAT");
    let err = flexplan::formulation::build_model(&s)
        .unwrap_err()
        .to_string();
    assert!(
        err.contains("system.dangling_carrier") && err.contains("HEAT"),
        "{err}"
    );
}

#[test]
fn boiler_alone_covers_demand() {
    let mut s = single(1);
    add_tech(&mut s, boiler(20.0, 0.9, 1.0));
    set_demand(&mut s, "HEAT", &[9.0]);
    let (m, sol) = run_optimal(&s);
    assert!(close(
        value(&m, &sol.primal, out_key(&s, 1, 0, "GB", "HEAT", 0)),
        9.0
    ));
    let act = VarKey::new(VarKind::Activity)
        .node(NodeId(1))
        .step(0)
        .obj(1)
        .mode(0);
    assert!(close(value(&m, &sol.primal, act), 10.0));
}

#[test]
fn storage_discharge_enters_balance_at_face_value() {
    let mut s = single(1);
    add_tech(&mut s, boiler(20.0, 1.0, 1.0));
    add_storage(&mut s, storage("HEAT"));
    set_demand(&mut s, "HEAT", &[10.0]);
    let m = build(&s);
    let r = row(&m, "bal[node=1,t=0,e=HEAT]");
    let x = point(
        &m,
        &[
            (out_key(&s, 1, 0, "GB", "HEAT", 0), 8.0),
            (storage_key(VarKind::Discharge, 1, 0), 2.0),
        ],
    );
    assert!(violation(&m, r, &x).abs() < 1e-12);
    let x = point(
        &m,
        &[
            (out_key(&s, 1, 0, "GB", "HEAT", 0), 10.0),
            (storage_key(VarKind::Discharge, 1, 0), 2.0),
        ],
    );
    assert!(close(violation(&m, r, &x), 2.0));
}

#[test]
fn closed_markets_block_imports() {
    let mut s = single(1);
    s.system.technologies[0].v_init = 100.0;
    add_tech(
        &mut s,
        Technology {
            opex_var: 100.0,
            ..tech("GEN", vec![mode("run", &[], &[("EL", 1.0)], 0.0)], 10.0)
        },
    );
    set_demand(&mut s, "EL", &[5.0]);
    let (m, sol) = run_optimal(&s);
    assert!(value(&m, &sol.primal, out_key(&s, 1, 0, "GRID", "EL", 0)).abs() < 1e-9);
    assert!(close(sol.objective, 500.0));
}

fn reserve_site() -> flexplan::study::Study {
    let mut s = single(1);
    s.system.technologies[0].v_init = 100.0;
    s.system.market.day_ahead = true;
    s.system.market.reserve = true;
    s
}

#[test]
fn downward_activation_adds_to_import() {
    let mut s = reserve_site();
    each_node(&mut s, |d| d.sigma_dwn = vec![1.0]);
    let m = build(&s);
    let r = row(&m, "imp[node=1,t=0]");
    let dwn = VarKey::new(VarKind::Dwn).node(NodeId(0)).step(0);
    let imp = out_key(&s, 1, 0, "GRID", "EL", 0);
    let x = point(&m, &[(da_buy(0), 10.0), (dwn, 3.0), (imp, 13.0)]);
    assert!(violation(&m, r, &x) < 1e-12);
    let x = point(&m, &[(da_buy(0), 10.0), (dwn, 3.0), (imp, 12.0)]);
    assert!(close(violation(&m, r, &x), 1.0));
}

#[test]
fn upward_activation_reduces_import() {
    let mut s = reserve_site();
    each_node(&mut s, |d| d.sigma_up = vec![1.0]);
    let up = VarKey::new(VarKind::Up).node(NodeId(0)).step(0);
    let imp = out_key(&s, 1, 0, "GRID", "EL", 0);
    let m = build(&s);
    let x = point(&m, &[(da_buy(0), 10.0), (up, 4.0), (imp, 6.0)]);
    assert!(violation(&m, row(&m, "imp[node=1,t=0]"), &x) < 1e-12);

    for (demand, status) in [(6.0, Status::Optimal), (7.0, Status::Infeasible)] {
        let mut s = s.clone();
        set_demand(&mut s, "EL", &[demand]);
        let mut m = build(&s);
        for (k, v) in [(da_buy(0), 10.0), (up, 4.0)] {
            let j = m.col(&k).unwrap();
            m.problem.col_lower[j] = v;
            m.problem.col_upper[j] = v;
        }
        let sol = flexplan::lp::solve(&m.problem, &Default::default()).unwrap();
        assert_eq!(sol.status, status, "demand {demand}");
    }
}

#[test]
fn conversion_and_availability() {
    let mut s = single(3);
    s.system.technologies[0].v_init = 100.0;
    add_tech(
        &mut s,
        Technology {
            availability: Some("pv".into()),
            ..tech("PV", vec![mode("gen", &[], &[("EL", 1.0)], 0.0)], 4.0)
        },
    );
    each_node(&mut s, |d| {
        d.availability.insert("pv".into(), vec![0.0, 0.5, 1.0]);
    });
    day_ahead(&mut s, &[10.0; 3]);
    let (m, sol) = run_optimal(&s);
    for (t, want) in [0.0, 2.0, 4.0].into_iter().enumerate() {
        assert!(
            close(
                value(&m, &sol.primal, out_key(&s, 1, t, "PV", "EL", 0)),
                want
            ),
            "step {t}"
        );
    }
}

#[test]
fn outage_forces_zero_output() {
    let mut s = single(2);
    s.system.technologies[0].v_init = 10.0;
    add_tech(
        &mut s,
        Technology {
            availability: Some("pv".into()),
            ..tech("PV", vec![mode("gen", &[], &[("EL", 1.0)], 0.0)], 4.0)
        },
    );
    each_node(&mut s, |d| {
        d.availability.insert("pv".into(), vec![0.0, 0.0]);
    });
    set_demand(&mut s, "EL", &[2.0, 2.0]);
    day_ahead(&mut s, &[30.0, 30.0]);
    let (m, sol) = run_optimal(&s);
    for t in 0..2 {
        assert!(value(&m, &sol.primal, out_key(&s, 1, t, "PV", "EL", 0)).abs() < 1e-9);
        assert!(close(
            value(&m, &sol.primal, out_key(&s, 1, t, "GRID", "EL", 0)),
            2.0
        ));
    }
}

#[test]
fn full_range_ramping_adds_no_rows() {
    let mut s = single(4);
    add_tech(&mut s, boiler(10.0, 1.0, 1.0));
    let m = build(&s);
    assert!(!m.problem.row_names.iter().any(|r| r.starts_with("ramp")));
}

#[test]
fn ramping_band_within_stage() {
    let mut s = single(2);
    add_tech(
        &mut s,
        Technology {
            ramp_beta: 0.1,
            ..boiler(10.0, 1.0, 1.0)
        },
    );
    s.horizon.initial_output = 5.0;
    let m = build(&s);
    let up = row(&m, "ramp_up[node=1,t=1,obj=GB,e=HEAT,o=burn]");
    let dn = row(&m, "ramp_dn[node=1,t=1,obj=GB,e=HEAT,o=burn]");
    let y = |t| out_key(&s, 1, t, "GB", "HEAT", 0);
    for (y1, ok) in [
        (4.0, true),
        (6.0, true),
        (5.5, true),
        (3.9, false),
        (6.1, false),
    ] {
        let x = point(&m, &[(y(0), 5.0), (y(1), y1)]);
        let worst = violation(&m, up, &x).max(violation(&m, dn, &x));
        assert_eq!(worst <= 1e-12, ok, "y1 = {y1}");
    }
    // Step 0 is measured against the configured initial output.
    let x = point(&m, &[(y(0), 6.0)]);
    assert!(violation(&m, row(&m, "ramp_up[node=1,t=0,obj=GB,e=HEAT,o=burn]"), &x) <= 1e-12);
}

#[test]
fn ramping_across_stages_uses_parent_last_step() {
    let mut s = micro(2, &[vec![1.0], vec![0.5, 0.5]], 0);
    add_tech(
        &mut s,
        Technology {
            ramp_beta: 0.1,
            ..boiler(10.0, 1.0, 1.0)
        },
    );
    let m = build(&s);
    let parent = m.col(&out_key(&s, 1, 1, "GB", "HEAT", 0)).unwrap();
    for child in [2, 3] {
        let own = m.col(&out_key(&s, child, 0, "GB", "HEAT", 0)).unwrap();
        let r = row(
            &m,
            &format!("ramp_up[node={child},t=0,obj=GB,e=HEAT,o=burn]"),
        );
        let terms = row_terms(&m, r);
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[&own], 1.0);
        assert_eq!(terms[&parent], -1.0);
        assert!(close(m.problem.rhs[r], 1.0));
        let x = point(
            &m,
            &[
                (out_key(&s, 1, 1, "GB", "HEAT", 0), 5.0),
                (out_key(&s, child, 0, "GB", "HEAT", 0), 6.5),
            ],
        );
        assert!(close(violation(&m, r, &x), 0.5));
    }
}

fn heat_pump_site(flex: f64) -> flexplan::study::Study {
    let mut s = single(1);
    s.system.technologies[0].v_init = 100.0;
    add_tech(&mut s, boiler(100.0, 1.0, 100.0));
    add_tech(
        &mut s,
        Technology {
            heat_pump: true,
            ..tech(
                "HP",
                vec![mode("lift", &[("EL", 1.0)], &[("HEAT", 3.0)], 0.0)],
                100.0,
            )
        },
    );
    s.system.demand.flex_carriers = vec!["HEAT".into()];
    s.system.demand.mu_surplus = 0.5;
    set_demand(&mut s, "HEAT", &[30.0]);
    each_node(&mut s, |d| {
        d.flex.insert("HEAT".into(), vec![flex]);
    });
    day_ahead(&mut s, &[1.0]);
    s
}

#[test]
fn heat_pump_limited_by_surplus_heat() {
    let s = heat_pump_site(20.0);
    let (m, sol) = run_optimal(&s);
    assert!(close(
        value(&m, &sol.primal, in_key(&s, 1, 0, "HP", "EL", 0)),
        5.0
    ));
    assert!(close(
        value(&m, &sol.primal, out_key(&s, 1, 0, "HP", "HEAT", 0)),
        15.0
    ));

    let s = heat_pump_site(0.0);
    let (m, sol) = run_optimal(&s);
    assert!(value(&m, &sol.primal, out_key(&s, 1, 0, "HP", "HEAT", 0)).abs() < 1e-9);
}

#[test]
fn low_temperature_mode_has_no_high_temperature_column() {
    let (c, series) = case_study();
    let s = study_of(&c, &series).unwrap();
    let m = build(&s);
    let hp = tech_index(&s, "HP");
    let node = s.tree.leaves().next().unwrap().id;
    let key = VarKey::new(VarKind::Out).node(node).step(0).obj(hp).mode(0);
    assert!(m.col(&key.carrier(carrier_index(&s, "HEAT-HT"))).is_none());
    assert!(m.col(&key.carrier(carrier_index(&s, "HEAT-LT"))).is_some());
}

fn shifting_site(prices: [f64; 2], down: f64) -> flexplan::study::Study {
    let mut s = single(2);
    s.system.technologies[0].v_init = 100.0;
    s.system.load_shift.up_frac = 0.2;
    s.system.load_shift.down_frac = down;
    s.system.load_shift.carriers = vec!["EL".into()];
    s.system.load_shift.inconvenience_cost = 1.0;
    set_demand(&mut s, "EL", &[10.0, 10.0]);
    day_ahead(&mut s, &prices);
    s
}

fn shifts(s: &flexplan::study::Study) -> Vec<f64> {
    let (m, sol) = run_optimal(s);
    let el = carrier_index(s, "EL");
    let k = |kind, t: Option<usize>| {
        let k = VarKey::new(kind).node(NodeId(1)).carrier(el);
        value(&m, &sol.primal, t.map_or(k, |t| k.step(t)))
    };
    vec![
        k(VarKind::LsUp, Some(0)),
        k(VarKind::LsUp, Some(1)),
        k(VarKind::LsDwn, Some(0)),
        k(VarKind::LsDwn, Some(1)),
        k(VarKind::LsAggUp, None),
        k(VarKind::LsAggDwn, None),
    ]
}

#[test]
fn load_shifting_follows_price_spread() {
    let v = shifts(&shifting_site([10.0, 10.0], 0.3));
    assert!(v.iter().all(|x| x.abs() < 1e-9), "{v:?}");

    let v = shifts(&shifting_site([10.0, 50.0], 0.3));
    let want = [2.0, 0.0, 0.0, 2.0, 2.0, 2.0];
    for (a, b) in v.iter().zip(want) {
        assert!(close(*a, b), "{v:?}");
    }

    let v = shifts(&shifting_site([10.0, 50.0], 0.0));
    assert!(v.iter().all(|x| x.abs() < 1e-9), "{v:?}");
}

fn reserve_bound(x_max: f64, rm_volume: f64, reserve: bool) -> Option<(f64, f64)> {
    let mut s = single(1);
    s.system.market.reserve = reserve;
    s.system.market.keep_disabled_reserve_columns = true;
    s.system.market.x_max = x_max;
    s.system.market.rm_volume_frac = 0.5;
    s.history.rm_volume = vec![rm_volume];
    let m = build(&s);
    let j = m.col(&VarKey::new(VarKind::Up).node(NodeId(0)).step(0))?;
    let d = m.col(&VarKey::new(VarKind::Dwn).node(NodeId(0)).step(0))?;
    assert_eq!(m.problem.col_upper[j], m.problem.col_upper[d]);
    Some((m.problem.col_lower[j], m.problem.col_upper[j]))
}

#[test]
fn reserve_bid_bounds() {
    assert_eq!(reserve_bound(10.0, 14.0, true), Some((0.0, 7.0)));
    assert_eq!(reserve_bound(10.0, 30.0, true), Some((0.0, 10.0)));
    assert_eq!(reserve_bound(10.0, 30.0, false), Some((0.0, 0.0)));
}

#[test]
fn storage_recursion() {
    let mut s = single(2);
    add_storage(
        &mut s,
        Storage {
            loss_eps: 0.01,
            ..storage("EL")
        },
    );
    let m = build(&s);
    let r = row(&m, "soc[node=1,t=1,obj=ST]");
    let set = |soc1| {
        point(
            &m,
            &[
                (storage_key(VarKind::Soc, 1, 0), 10.0),
                (storage_key(VarKind::Charge, 1, 1), 5.0),
                (storage_key(VarKind::Soc, 1, 1), soc1),
            ],
        )
    };
    assert!(violation(&m, r, &set(14.9)) < 1e-12);
    assert!(close(violation(&m, r, &set(15.0)), 0.1));
}

#[test]
fn storage_power_grows_with_new_capacity() {
    let mut s = single(1);
    add_storage(
        &mut s,
        Storage {
            p_max: 0.0,
            theta: 1.0,
            e_max_init: 0.0,
            candidate: true,
            ..storage("EL")
        },
    );
    let m = build(&s);
    let r = row(&m, "pow[node=1,t=0,obj=ST]");
    let v = VarKey::new(VarKind::VNewStorage).obj(0);
    let x = point(&m, &[(v, 4.0), (storage_key(VarKind::Charge, 1, 0), 4.0)]);
    assert!(violation(&m, r, &x) < 1e-12);
    let x = point(&m, &[(v, 4.0), (storage_key(VarKind::Charge, 1, 0), 4.5)]);
    assert!(close(violation(&m, r, &x), 0.5));
}

#[test]
fn children_inherit_parent_state_of_charge() {
    let mut s = micro(2, &[vec![1.0], vec![0.5, 0.5]], 0);
    add_storage(&mut s, storage("EL"));
    let m = build(&s);
    let parent = m.col(&storage_key(VarKind::Soc, 1, 1)).unwrap();
    let mut seen = Vec::new();
    for child in [2, 3] {
        let r = row(&m, &format!("soc[node={child},t=0,obj=ST]"));
        let terms = row_terms(&m, r);
        assert!(close(terms[&parent], -0.99));
        seen.push((m.problem.rhs[r], terms.len()));
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[0].0, 0.0);
}

fn export_site(cap: f64) -> flexplan::study::Study {
    let mut s = single(1);
    s.system.technologies[0].v_init = 100.0;
    add_tech(
        &mut s,
        tech("PV", vec![mode("gen", &[], &[("EL", 1.0)], 0.0)], 10.0),
    );
    s.system.policy.export_cap = cap;
    day_ahead(&mut s, &[10.0]);
    s
}

#[test]
fn export_limit() {
    for (cap, want) in [(0.0, 0.0), (5.0, 5.0)] {
        let s = export_site(cap);
        let (m, sol) = run_optimal(&s);
        assert!(
            close(
                value(&m, &sol.primal, in_key(&s, 1, 0, "GRID", "EL", 1)),
                want
            ),
            "cap {cap}"
        );
    }
    let (_, loose) = run_optimal(&export_site(1e9));
    let (_, free) = run_optimal(&export_site(INF));
    assert!(close(loose.objective, free.objective));
    assert!(close(free.objective, -100.0));
}

#[test]
fn peak_tracks_largest_import() {
    let mut s = single(3);
    s.system.technologies[0].v_init = 100.0;
    s.system.market.grid_tariff_power = 10.0;
    set_demand(&mut s, "EL", &[3.0, 7.0, 5.0]);
    day_ahead(&mut s, &[1.0; 3]);
    let (m, sol) = run_optimal(&s);
    assert!(close(
        value(
            &m,
            &sol.primal,
            VarKey::new(VarKind::PeakMax).node(NodeId(1))
        ),
        7.0
    ));
    assert!(close(sol.objective, 15.0 + 70.0));

    s.system.market.grid_tariff_power = 0.0;
    let (_, sol) = run_optimal(&s);
    assert!(close(sol.objective, 15.0));
}

#[test]
fn peak_propagates_to_children() {
    let mut s = micro(1, &[vec![1.0], vec![0.5, 0.5]], 0);
    s.system.technologies[0].v_init = 100.0;
    s.system.market.grid_tariff_power = 10.0;
    set_demand(&mut s, "EL", &[4.0]);
    set_node_demand(&mut s, 1, "EL", &[7.0]);
    day_ahead(&mut s, &[1.0]);
    let (m, sol) = run_optimal(&s);
    for child in [2, 3] {
        assert!(close(
            value(
                &m,
                &sol.primal,
                VarKey::new(VarKind::PeakMax).node(NodeId(child))
            ),
            7.0
        ));
    }
}

fn emission_site(cap: Option<f64>, electric: bool) -> flexplan::study::Study {
    let mut s = single(2);
    s.system.technologies[0].v_init = 50.0;
    add_tech(&mut s, boiler(20.0, 1.0, 10.0));
    if electric {
        add_tech(
            &mut s,
            tech(
                "EB",
                vec![mode("heat", &[("EL", 1.0)], &[("HEAT", 1.0)], 0.0)],
                20.0,
            ),
        );
    }
    s.system.policy.emission_cap = cap;
    set_demand(&mut s, "HEAT", &[10.0, 10.0]);
    day_ahead(&mut s, &[40.0, 40.0]);
    s
}

#[test]
fn emission_cap() {
    let (_, sol) = run(&emission_site(Some(0.0), false));
    assert_eq!(sol.status, Status::Infeasible);

    let (m, free) = run_optimal(&emission_site(None, true));
    let (_, loose) = run_optimal(&emission_site(Some(1e12), true));
    assert!(close(free.objective, loose.objective));
    let e = m.expected_emissions(&free.primal);
    assert!(close(e, 0.2 * 20.0));

    let (m, capped) = run_optimal(&emission_site(Some(e / 2.0), true));
    assert!(close(m.expected_emissions(&capped.primal), e / 2.0));
    assert!(capped.objective >= free.objective);
    assert!(close(capped.objective, 10.0 * 10.0 + 40.0 * 10.0));
}

#[test]
fn objective_only_problem_has_no_rows() {
    let mut b = flexplan::lp::LpBuilder::new("objective-only");
    b.add_col("v_new[obj=A]", 0.0, 3.0, -2.0);
    b.add_col("v_new[obj=B]", 0.0, 5.0, 1.0);
    let p = b.build().unwrap();
    assert_eq!((p.n_rows(), p.n_cols()), (0, 2));
    let sol = flexplan::lp::solve(&p, &Default::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert_eq!(sol.primal, vec![3.0, 0.0]);
}

#[test]
fn study_without_operational_stage_is_rejected() {
    let mut s = micro(4, &[vec![1.0]], 1);
    add_storage(
        &mut s,
        Storage {
            candidate: true,
            ..storage("EL")
        },
    );
    let err = flexplan::formulation::build_model(&s)
        .unwrap_err()
        .to_string();
    assert!(err.contains("data.bidding_stage"), "{err}");
}

#[test]
fn one_node_one_step_row_count() {
    let mut s = single(1);
    s.system.technologies[0].v_init = 5.0;
    s.system.market.day_ahead = true;
    let m = build(&s);
    // conversion for import and export, capacity, EL balance, import,
    // export and peak rows.
    let mut names = m.problem.row_names.clone();
    names.sort();
    assert_eq!(
        names,
        [
            "bal[node=1,t=0,e=EL]",
            "cap[node=1,t=0,obj=GRID]",
            "conv_in[node=1,t=0,obj=GRID,e=EL,o=export]",
            "conv_out[node=1,t=0,obj=GRID,e=EL,o=import]",
            "exp[node=1,t=0]",
            "imp[node=1,t=0]",
            "peak[node=1,t=0]",
        ]
    );
}

#[test]
fn day_ahead_costs_decompose() {
    let mut s = single(2);
    s.system.technologies[0].v_init = 20.0;
    set_demand(&mut s, "EL", &[4.0, 6.0]);
    day_ahead(&mut s, &[10.0, 20.0]);
    let (m, sol) = run_optimal(&s);
    let c = m.decompose_costs(&sol).unwrap();
    assert!(close(c.day_ahead, 160.0));
    for (name, v) in c.terms() {
        if name != "day_ahead" {
            assert!(v.abs() < 1e-9, "{name} = {v}");
        }
    }
}

#[test]
fn toy_invariants() {
    let (c, series) = toy();
    let s = study_of(&c, &series).unwrap();
    let (m, sol) = run_optimal(&s);
    let x = &sol.primal;

    let costs = m.decompose_costs(&sol).unwrap();
    assert!((costs.total() - sol.objective).abs() <= 1e-6 * sol.objective.abs().max(1.0));
    assert!(costs.capacity <= 0.0);

    let report = check_feasibility(&m.problem, x, 1e-9).unwrap();
    assert!(report.is_feasible(1e-9), "{:?}", report.rows);
    for (r, name) in m.problem.row_names.iter().enumerate() {
        if name.starts_with("soc[") || name.starts_with("ls_bal") {
            assert!(violation(&m, r, x) <= 1e-9, "{name}");
        }
    }

    // Siblings at both operational stages read the root's bids.
    let first = m.col(&da_buy(0)).unwrap();
    let second = m.col(&da_buy(24)).unwrap();
    for n in s.tree.nodes().iter().filter(|n| n.stage > 0) {
        let r = row(&m, &format!("imp[node={},t=0]", n.id));
        let terms = row_terms(&m, r);
        let (own, other) = if n.stage == 1 {
            (first, second)
        } else {
            (second, first)
        };
        assert!(terms.contains_key(&own));
        assert!(!terms.contains_key(&other));
    }
}

#[test]
fn charge_and_discharge_never_overlap() {
    let studies = [toy(), desk_study(1), desk_study(2), desk_study(3)];
    for (c, series) in studies {
        let s = study_of(&c, &series).unwrap();
        let (m, sol) = run_optimal(&s);
        for j in m.cols_of(VarKind::Charge) {
            let k = m.keys[j];
            let d = value(
                &m,
                &sol.primal,
                VarKey {
                    kind: VarKind::Discharge,
                    ..k
                },
            );
            assert!(sol.primal[j].min(d) <= 1e-6, "{}: {k:?}", c.name);
        }
    }
}

#[test]
fn disabled_reserve_matches_zero_bounds() {
    let (mut c, series) = toy();
    c.market.reserve = false;
    let (_, dropped) = run_optimal(&study_of(&c, &series).unwrap());
    c.market.keep_disabled_reserve_columns = true;
    let (m, kept) = run_optimal(&study_of(&c, &series).unwrap());
    assert!(m.count(VarKind::Up) > 0);
    assert!((dropped.objective - kept.objective).abs() <= 1e-9 * dropped.objective.abs());
}

#[test]
fn path_emission_cap_covers_ancestors() {
    let mut s = micro(1, &[vec![1.0], vec![0.5, 0.5]], 0);
    add_tech(&mut s, boiler(20.0, 1.0, 10.0));
    s.system.policy.emission_cap = Some(100.0);
    s.system.policy.emission_scope = flexplan::system::EmissionScope::Path;
    let m = build(&s);
    let act = |n| {
        m.col(
            &VarKey::new(VarKind::Activity)
                .node(NodeId(n))
                .step(0)
                .obj(1)
                .mode(0),
        )
        .unwrap()
    };
    let terms = row_terms(&m, row(&m, "co2_cap[node=3]"));
    assert_eq!(
        terms.keys().copied().collect::<Vec<_>>(),
        vec![act(1), act(3)]
    );
}
