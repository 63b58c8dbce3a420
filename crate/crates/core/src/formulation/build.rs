use std::collections::HashMap;

use super::{column_name, index_name, CostTerm, FormulationError, Model, VarKey, VarKind};
use crate::lp::{ColId, LpBuilder, Sense};
use crate::study::Study;
use crate::system::{annualized_cost, shift_bounds, EmissionScope};
use crate::tree::NodeId;

const INF: f64 = f64::INFINITY;

/// Assembles the deterministic-equivalent LP of `study`.
pub fn build_model(study: &Study) -> Result<Model, FormulationError> {
    check(study)?;
    let mut cx = Ctx::new(study);
    cx.investment()?;
    cx.bids();
    let mut order: Vec<NodeId> = study
        .tree
        .nodes()
        .iter()
        .filter(|n| study.is_operational(n.id))
        .map(|n| n.id)
        .collect();
    order.sort_by_key(|&n| (study.tree.node(n).stage, n));
    for n in order {
        cx.operational_node(n)?;
    }
    let Ctx {
        lp,
        keys,
        lookup,
        terms,
        emissions,
        ..
    } = cx;
    let problem = lp.build()?;
    Ok(Model {
        problem,
        keys,
        lookup,
        cost_terms: terms,
        emissions,
    })
}

fn check(study: &Study) -> Result<(), FormulationError> {
    for n in study.tree.nodes() {
        if study.is_operational(n.id) && study.node_data(n.id).is_none() {
            return Err(FormulationError::MissingPriceSeries(n.data_key.clone()));
        }
    }
    let report = study.validate();
    if report.is_empty() {
        Ok(())
    } else {
        Err(FormulationError::InconsistentSpec(report.to_string()))
    }
}

/// `frac * volume`, with a zero fraction closing the market even for unlimited volumes.
fn frac_cap(frac: f64, volume: f64) -> f64 {
    if frac == 0.0 {
        0.0
    } else {
        frac * volume
    }
}

struct Ctx<'a> {
    s: &'a Study,
    lp: LpBuilder,
    keys: Vec<VarKey>,
    lookup: HashMap<VarKey, usize>,
    terms: Vec<(usize, CostTerm, f64)>,
    emissions: Vec<(usize, f64)>,
    carrier_idx: HashMap<&'a str, usize>,
    el: usize,
}

impl<'a> Ctx<'a> {
    fn new(s: &'a Study) -> Self {
        let carrier_idx = s
            .system
            .carriers
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.as_str(), i))
            .collect();
        let el = s
            .system
            .carriers
            .iter()
            .position(|c| c.electricity)
            .unwrap_or(0);
        Ctx {
            s,
            lp: LpBuilder::new(if s.name.is_empty() {
                "study".to_string()
            } else {
                s.name.clone()
            }),
            keys: Vec::new(),
            lookup: HashMap::new(),
            terms: Vec::new(),
            emissions: Vec::new(),
            carrier_idx,
            el,
        }
    }

    fn add(&mut self, key: VarKey, lower: f64, upper: f64) -> ColId {
        let c = self
            .lp
            .add_col(column_name(self.s, &key), lower, upper, 0.0);
        self.keys.push(key);
        self.lookup.insert(key, c.0);
        c
    }

    fn get(&self, key: VarKey) -> Option<ColId> {
        self.lookup.get(&key).map(|&j| ColId(j))
    }

    fn cost(&mut self, c: ColId, term: CostTerm, v: f64) {
        if v != 0.0 {
            self.lp.add_cost(c, v);
            self.terms.push((c.0, term, v));
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        kind: &str,
        node: Option<NodeId>,
        step: Option<usize>,
        obj: Option<&str>,
        carrier: Option<usize>,
        mode: Option<&str>,
        sense: Sense,
        rhs: f64,
        terms: Vec<(ColId, f64)>,
    ) {
        let e = carrier.map(|e| self.s.system.carriers[e].name.as_str());
        let name = index_name(kind, node, step, obj, e, mode);
        self.lp.add_row(name, sense, rhs, terms);
    }

    fn investment(&mut self) -> Result<(), FormulationError> {
        let sys = &self.s.system;
        let scale = self.s.horizon_days() / 365.0;
        let rate = sys.policy.discount_rate;
        let bad = |e: crate::system::SystemError| FormulationError::InconsistentSpec(e.to_string());
        let mut budget = Vec::new();
        for (i, t) in sys.technologies.iter().enumerate() {
            if t.candidate {
                let c = self.add(
                    VarKey::new(VarKind::VNewTech).obj(i),
                    0.0,
                    t.max_new.unwrap_or(INF),
                );
                self.cost(
                    c,
                    CostTerm::Investment,
                    annualized_cost(t.capex, rate, t.lifetime).map_err(bad)? * scale,
                );
                budget.push((c, t.capex));
            }
        }
        for (b, st) in sys.storage.iter().enumerate() {
            if st.candidate {
                let c = self.add(
                    VarKey::new(VarKind::VNewStorage).obj(b),
                    0.0,
                    st.max_new.unwrap_or(INF),
                );
                self.cost(
                    c,
                    CostTerm::Investment,
                    annualized_cost(st.capex, rate, st.lifetime).map_err(bad)? * scale,
                );
                budget.push((c, st.capex));
            }
        }
        if sys.policy.budget.is_finite() && !budget.is_empty() {
            self.row(
                "budget",
                None,
                None,
                None,
                None,
                None,
                Sense::Le,
                sys.policy.budget,
                budget,
            );
        }
        Ok(())
    }

    fn bids(&mut self) {
        let s = self.s;
        if s.system.grid().is_none() {
            return;
        }
        let m = &s.system.market;
        let t_len = s.horizon.steps_per_stage;
        let steps = s.operational_stages() * t_len;
        let bidding: Vec<NodeId> = s
            .tree
            .nodes()
            .iter()
            .filter(|n| n.stage == s.horizon.bidding_stage)
            .map(|n| n.id)
            .collect();
        for p in bidding {
            for h in 0..steps {
                let key = |k| VarKey::new(k).node(p).step(h);
                if m.day_ahead {
                    self.add(key(VarKind::DaBuy), 0.0, INF);
                    self.add(key(VarKind::DaSell), 0.0, INF);
                }
                if m.intraday {
                    let cap = frac_cap(m.id_liquidity_frac, s.history.id_volume[h % t_len]);
                    self.add(key(VarKind::IdBuy), 0.0, cap);
                    self.add(key(VarKind::IdSell), 0.0, cap);
                }
                if m.reserve || m.keep_disabled_reserve_columns {
                    let cap = if m.reserve {
                        m.x_max
                            .min(frac_cap(m.rm_volume_frac, s.history.rm_volume[h % t_len]))
                    } else {
                        0.0
                    };
                    self.add(key(VarKind::Up), 0.0, cap);
                    self.add(key(VarKind::Dwn), 0.0, cap);
                }
            }
        }
    }

    fn operational_node(&mut self, w: NodeId) -> Result<(), FormulationError> {
        let s = self.s;
        let sys = &s.system;
        let tree = &s.tree;
        let rec = tree.node(w);
        let pi = rec.probability;
        let d = s
            .node_data(w)
            .ok_or_else(|| FormulationError::MissingPriceSeries(rec.data_key.clone()))?;
        let t_len = s.horizon.steps_per_stage;
        let b = s.horizon.bidding_stage;
        let p = tree
            .ancestor_at_stage(w, b)
            .map_err(|_| FormulationError::MissingAncestor(w))?;
        let prev = tree.parent(w).filter(|&q| s.is_operational(q));
        let leaf = tree.is_leaf(w);
        let hoff = (rec.stage - b - 1) * t_len;
        let el = self.el;
        let grid = sys.grid().map(|(gi, _)| gi);
        let node = Some(w);
        let shift: Vec<usize> = sys
            .shift_carriers()
            .iter()
            .map(|c| self.carrier_idx[c])
            .collect();

        let peak = grid.map(|_| {
            let c = self.add(VarKey::new(VarKind::PeakMax).node(w), 0.0, INF);
            if leaf {
                self.cost(c, CostTerm::GridTariff, pi * sys.market.grid_tariff_power);
            }
            if let Some(q) = prev {
                let pc = self
                    .get(VarKey::new(VarKind::PeakMax).node(q))
                    .expect("parent peak column");
                self.row(
                    "peak_prop",
                    node,
                    None,
                    None,
                    None,
                    None,
                    Sense::Ge,
                    0.0,
                    vec![(c, 1.0), (pc, -1.0)],
                );
            }
            c
        });

        for t in 0..t_len {
            let step = Some(t);
            for (i, tech) in sys.technologies.iter().enumerate() {
                let obj = Some(tech.name.as_str());
                let phi = tech
                    .availability
                    .as_ref()
                    .map_or(1.0, |a| d.availability[a][t]);
                let v = self.get(VarKey::new(VarKind::VNewTech).obj(i));
                let mut cap_terms = Vec::new();
                for (o, mode) in tech.modes.iter().enumerate() {
                    let a = self.add(
                        VarKey::new(VarKind::Activity)
                            .node(w)
                            .step(t)
                            .obj(i)
                            .mode(o),
                        0.0,
                        INF,
                    );
                    self.cost(
                        a,
                        CostTerm::Opex,
                        pi * (tech.opex_var + mode.emission * d.price_co2[t]),
                    );
                    if mode.emission != 0.0 {
                        self.emissions.push((a.0, pi * mode.emission));
                    }
                    let mname = Some(mode.name.as_str());
                    for (cname, &eta) in &mode.outputs {
                        if eta <= 0.0 {
                            continue;
                        }
                        let e = self.carrier_idx[cname.as_str()];
                        let key = VarKey::new(VarKind::Out)
                            .node(w)
                            .step(t)
                            .obj(i)
                            .carrier(e)
                            .mode(o);
                        let y = self.add(key, 0.0, INF);
                        self.row(
                            "conv_out",
                            node,
                            step,
                            obj,
                            Some(e),
                            mname,
                            Sense::Eq,
                            0.0,
                            vec![(y, 1.0), (a, -eta)],
                        );
                        cap_terms.push((y, 1.0));
                        self.ramping(key, y, prev, v, tech.ramp_beta, tech.v_init);
                    }
                    for (cname, &eta) in &mode.inputs {
                        if eta <= 0.0 {
                            continue;
                        }
                        let e = self.carrier_idx[cname.as_str()];
                        let y = self.add(
                            VarKey::new(VarKind::In)
                                .node(w)
                                .step(t)
                                .obj(i)
                                .carrier(e)
                                .mode(o),
                            0.0,
                            INF,
                        );
                        self.row(
                            "conv_in",
                            node,
                            step,
                            obj,
                            Some(e),
                            mname,
                            Sense::Eq,
                            0.0,
                            vec![(y, 1.0), (a, -eta)],
                        );
                    }
                }
                let rhs = phi * tech.v_init;
                if rhs.is_finite() && !cap_terms.is_empty() {
                    if let Some(v) = v {
                        cap_terms.push((v, -phi));
                    }
                    self.row(
                        "cap",
                        node,
                        step,
                        obj,
                        None,
                        None,
                        Sense::Le,
                        rhs,
                        cap_terms,
                    );
                }
            }

            for (bi, st) in sys.storage.iter().enumerate() {
                let obj = Some(st.name.as_str());
                let key = |k| VarKey::new(k).node(w).step(t).obj(bi);
                let ch = self.add(key(VarKind::Charge), 0.0, INF);
                let dis = self.add(key(VarKind::Discharge), 0.0, INF);
                let soc = self.add(key(VarKind::Soc), 0.0, INF);
                self.cost(ch, CostTerm::Opex, pi * st.degradation_cost / 2.0);
                self.cost(dis, CostTerm::Opex, pi * st.degradation_cost / 2.0);
                let v = self.get(VarKey::new(VarKind::VNewStorage).obj(bi));
                let inv_dis = 1.0 / st.eta_discharge;
                let keep = 1.0 - st.loss_eps;

                let mut pow = vec![(ch, 1.0), (dis, inv_dis)];
                pow.extend(v.map(|v| (v, -st.theta)));
                self.row("pow", node, step, obj, None, None, Sense::Le, st.p_max, pow);

                let mut rec_terms = vec![(soc, 1.0), (ch, -1.0), (dis, inv_dis)];
                let mut rhs = 0.0;
                let before = if t > 0 {
                    Some(VarKey::new(VarKind::Soc).node(w).step(t - 1).obj(bi))
                } else {
                    prev.map(|q| VarKey::new(VarKind::Soc).node(q).step(t_len - 1).obj(bi))
                };
                match before {
                    Some(k) => {
                        rec_terms.push((self.get(k).expect("previous state of charge"), -keep))
                    }
                    None => {
                        rhs = keep * st.soc_init_frac * st.e_max_init;
                        rec_terms.extend(v.map(|v| (v, -keep * st.soc_init_frac)));
                    }
                }
                self.row(
                    "soc",
                    node,
                    step,
                    obj,
                    None,
                    None,
                    Sense::Eq,
                    rhs,
                    rec_terms,
                );

                let mut cap = vec![(soc, 1.0)];
                cap.extend(v.map(|v| (v, -1.0)));
                self.row(
                    "soc_cap",
                    node,
                    step,
                    obj,
                    None,
                    None,
                    Sense::Le,
                    st.e_max_init,
                    cap,
                );

                if leaf && t + 1 == t_len {
                    let mut end = vec![(soc, 1.0)];
                    end.extend(v.map(|v| (v, -st.soc_init_frac)));
                    self.row(
                        "soc_end",
                        node,
                        step,
                        obj,
                        None,
                        None,
                        Sense::Ge,
                        st.soc_init_frac * st.e_max_init,
                        end,
                    );
                }
            }

            for &e in &shift {
                let dref = d.demand.get(&sys.carriers[e].name).map_or(0.0, |v| v[t]);
                let (up, dn) = shift_bounds(&sys.load_shift, dref, t);
                let key = |k| VarKey::new(k).node(w).step(t).carrier(e);
                let u = self.add(key(VarKind::LsUp), 0.0, up);
                let dd = self.add(key(VarKind::LsDwn), 0.0, dn);
                let c = pi * sys.load_shift.inconvenience_cost / 2.0;
                self.cost(u, CostTerm::Opex, c);
                self.cost(dd, CostTerm::Opex, c);
            }

            for (e, carrier) in sys.carriers.iter().enumerate() {
                let mut terms = Vec::new();
                for (i, tech) in sys.technologies.iter().enumerate() {
                    for o in 0..tech.modes.len() {
                        let k = VarKey::new(VarKind::Out)
                            .node(w)
                            .step(t)
                            .obj(i)
                            .carrier(e)
                            .mode(o);
                        terms.extend(self.get(k).map(|c| (c, 1.0)));
                        let k = VarKey {
                            kind: VarKind::In,
                            ..k
                        };
                        terms.extend(self.get(k).map(|c| (c, -1.0)));
                    }
                }
                for (bi, st) in sys.storage.iter().enumerate() {
                    if st.carrier == carrier.name {
                        let k = VarKey::new(VarKind::Charge).node(w).step(t).obj(bi);
                        terms.push((self.get(k).unwrap(), -st.loss_factor()));
                        let k = VarKey {
                            kind: VarKind::Discharge,
                            ..k
                        };
                        terms.push((self.get(k).unwrap(), 1.0));
                    }
                }
                let k = VarKey::new(VarKind::LsUp).node(w).step(t).carrier(e);
                terms.extend(self.get(k).map(|c| (c, -1.0)));
                let k = VarKey {
                    kind: VarKind::LsDwn,
                    ..k
                };
                terms.extend(self.get(k).map(|c| (c, 1.0)));
                let rhs = d.demand.get(&carrier.name).map_or(0.0, |v| v[t]);
                self.row(
                    "bal",
                    node,
                    step,
                    None,
                    Some(e),
                    None,
                    Sense::Eq,
                    rhs,
                    terms,
                );
            }

            if let Some(gi) = grid {
                self.market_rows(
                    w,
                    t,
                    p,
                    hoff + t,
                    gi,
                    peak.expect("peak column exists with a grid"),
                );
            }

            let heat: Vec<usize> = sys
                .carriers
                .iter()
                .enumerate()
                .filter(|(_, c)| c.heat)
                .map(|(e, _)| e)
                .collect();
            if sys.technologies.iter().any(|t| t.heat_pump) && !heat.is_empty() {
                let mut terms = Vec::new();
                for (i, tech) in sys
                    .technologies
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.heat_pump)
                {
                    for o in 0..tech.modes.len() {
                        for &e in &heat {
                            let k = VarKey::new(VarKind::Out)
                                .node(w)
                                .step(t)
                                .obj(i)
                                .carrier(e)
                                .mode(o);
                            terms.extend(self.get(k).map(|c| (c, 1.0)));
                        }
                        let k = VarKey::new(VarKind::In)
                            .node(w)
                            .step(t)
                            .obj(i)
                            .carrier(el)
                            .mode(o);
                        terms.extend(self.get(k).map(|c| (c, -1.0)));
                    }
                }
                let flex: f64 = sys
                    .demand
                    .flex_carriers
                    .iter()
                    .filter(|c| sys.carrier(c).is_some_and(|k| k.heat))
                    .map(|c| d.flex[c][t])
                    .sum();
                self.row(
                    "hp",
                    node,
                    step,
                    None,
                    None,
                    None,
                    Sense::Le,
                    sys.demand.mu_surplus * flex,
                    terms,
                );
            }
        }

        let in_scope = |stage: usize| {
            sys.load_shift
                .balance_stages
                .as_ref()
                .is_none_or(|v| v.contains(&stage))
        };
        for &e in &shift {
            let up = self.add(VarKey::new(VarKind::LsAggUp).node(w).carrier(e), 0.0, INF);
            let dn = self.add(VarKey::new(VarKind::LsAggDwn).node(w).carrier(e), 0.0, INF);
            for (agg, kind, step_kind, name) in [
                (up, VarKind::LsAggUp, VarKind::LsUp, "ls_agg_up"),
                (dn, VarKind::LsAggDwn, VarKind::LsDwn, "ls_agg_dwn"),
            ] {
                let mut terms = vec![(agg, 1.0)];
                for t in 0..t_len {
                    terms.push((
                        self.get(VarKey::new(step_kind).node(w).step(t).carrier(e))
                            .unwrap(),
                        -1.0,
                    ));
                }
                if let Some(q) = prev.filter(|&q| !in_scope(tree.node(q).stage)) {
                    terms.push((
                        self.get(VarKey::new(kind).node(q).carrier(e)).unwrap(),
                        -1.0,
                    ));
                }
                self.row(name, node, None, None, Some(e), None, Sense::Eq, 0.0, terms);
            }
            if in_scope(rec.stage) {
                self.row(
                    "ls_bal",
                    node,
                    None,
                    None,
                    Some(e),
                    None,
                    Sense::Eq,
                    0.0,
                    vec![(up, 1.0), (dn, -1.0)],
                );
            }
        }

        if let Some(cap) = sys.policy.emission_cap {
            let nodes: Vec<NodeId> = match sys.policy.emission_scope {
                EmissionScope::Node => vec![w],
                EmissionScope::Path => tree
                    .path(w)
                    .into_iter()
                    .filter(|&q| s.is_operational(q))
                    .collect(),
            };
            let mut terms = Vec::new();
            for q in nodes {
                for t in 0..t_len {
                    for (i, tech) in sys.technologies.iter().enumerate() {
                        for (o, mode) in tech.modes.iter().enumerate() {
                            if mode.emission != 0.0 {
                                let k = VarKey::new(VarKind::Activity)
                                    .node(q)
                                    .step(t)
                                    .obj(i)
                                    .mode(o);
                                terms.push((self.get(k).unwrap(), mode.emission));
                            }
                        }
                    }
                }
            }
            self.row(
                "co2_cap",
                node,
                None,
                None,
                None,
                None,
                Sense::Le,
                cap,
                terms,
            );
        }
        Ok(())
    }

    /// Ramping rows for output column `y` against the previous step, the parent's
    /// last step, or the configured initial output.
    fn ramping(
        &mut self,
        key: VarKey,
        y: ColId,
        prev: Option<NodeId>,
        v: Option<ColId>,
        beta: f64,
        v_init: f64,
    ) {
        if beta >= 1.0 || !(beta * v_init).is_finite() {
            return;
        }
        let t = key.step.unwrap();
        let before = if t > 0 {
            Some(VarKey {
                step: Some(t - 1),
                ..key
            })
        } else {
            prev.map(|q| VarKey {
                node: Some(q),
                step: Some(self.s.horizon.steps_per_stage - 1),
                ..key
            })
        };
        let before = before.map(|k| self.get(k).expect("previous output column"));
        let slack = beta * v_init;
        let y0 = self.s.horizon.initial_output;
        let sys = &self.s.system;
        let tech = &sys.technologies[key.obj.unwrap()];
        let obj = Some(tech.name.as_str());
        let mode = Some(tech.modes[key.mode.unwrap()].name.as_str());
        for (kind, sign) in [("ramp_up", 1.0), ("ramp_dn", -1.0)] {
            let mut terms = vec![(y, sign)];
            let mut rhs = slack;
            match before {
                Some(c) => terms.push((c, -sign)),
                None => rhs += sign * y0,
            }
            terms.extend(v.map(|v| (v, -beta)));
            self.row(
                kind,
                key.node,
                key.step,
                obj,
                key.carrier,
                mode,
                Sense::Le,
                rhs,
                terms,
            );
        }
    }

    fn market_rows(&mut self, w: NodeId, t: usize, p: NodeId, h: usize, gi: usize, peak: ColId) {
        let s = self.s;
        let sys = &s.system;
        let d = s.node_data(w).unwrap();
        let pi = s.tree.node(w).probability;
        let el = self.el;
        let el_name = sys.carriers[el].name.as_str();
        let grid = &sys.technologies[gi];
        let mut imports = Vec::new();
        let mut exports = Vec::new();
        for (o, mode) in grid.modes.iter().enumerate() {
            if mode.outputs.get(el_name).is_some_and(|&v| v > 0.0) {
                let k = VarKey::new(VarKind::Out)
                    .node(w)
                    .step(t)
                    .obj(gi)
                    .carrier(el)
                    .mode(o);
                imports.push((self.get(k).unwrap(), 1.0));
            }
            if mode.inputs.get(el_name).is_some_and(|&v| v > 0.0) {
                let k = VarKey::new(VarKind::In)
                    .node(w)
                    .step(t)
                    .obj(gi)
                    .carrier(el)
                    .mode(o);
                exports.push((self.get(k).unwrap(), 1.0));
            }
        }
        let bid = |cx: &Self, kind| cx.get(VarKey::new(kind).node(p).step(h));
        let node = Some(w);
        let step = Some(t);

        let mut imp = imports.clone();
        let mut exp = exports.clone();
        if let Some(c) = bid(self, VarKind::DaBuy) {
            imp.push((c, -1.0));
            self.cost(c, CostTerm::DayAhead, pi * d.price_da[t]);
        }
        if let Some(c) = bid(self, VarKind::DaSell) {
            exp.push((c, -1.0));
            self.cost(c, CostTerm::DayAhead, -pi * d.price_da[t]);
        }
        if let Some(c) = bid(self, VarKind::IdBuy) {
            imp.push((c, -d.sigma_id_buy[t]));
            self.cost(
                c,
                CostTerm::Intraday,
                pi * d.price_id_buy[t] * d.sigma_id_buy[t],
            );
        }
        if let Some(c) = bid(self, VarKind::IdSell) {
            exp.push((c, -d.sigma_id_sell[t]));
            self.cost(
                c,
                CostTerm::Intraday,
                -pi * d.price_id_sell[t] * d.sigma_id_sell[t],
            );
        }
        if let Some(c) = bid(self, VarKind::Dwn) {
            imp.push((c, -d.sigma_dwn[t]));
            self.cost(c, CostTerm::Capacity, -pi * d.price_cm_dwn[t]);
            self.cost(
                c,
                CostTerm::Activation,
                pi * d.sigma_dwn[t] * d.price_act_dwn[t],
            );
        }
        if let Some(c) = bid(self, VarKind::Up) {
            imp.push((c, d.sigma_up[t]));
            self.cost(c, CostTerm::Capacity, -pi * d.price_cm_up[t]);
            self.cost(
                c,
                CostTerm::Activation,
                -pi * d.sigma_up[t] * d.price_act_up[t],
            );
        }
        self.row("imp", node, step, None, None, None, Sense::Eq, 0.0, imp);
        self.row("exp", node, step, None, None, None, Sense::Eq, 0.0, exp);
        if sys.policy.export_cap.is_finite() {
            self.row(
                "exp_cap",
                node,
                step,
                None,
                None,
                None,
                Sense::Le,
                sys.policy.export_cap,
                exports,
            );
        }
        imports.push((peak, -1.0));
        self.row(
            "peak",
            node,
            step,
            None,
            None,
            None,
            Sense::Le,
            0.0,
            imports,
        );
    }
}
