//! Arc-based MILP with big-M linearized indicator constraints, written in
//! CPLEX LP format.

use crate::model::{load_profile, Instance, Route};
use crate::scalar::Scalar;
use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Arc `(i, j)` is traversed.
    X(usize, usize),
    /// Cumulative length on arrival at a vertex.
    T(usize),
    /// Load on departure from a vertex.
    L(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::X(i, j) => write!(f, "X_{i}_{j}"),
            Var::T(i) => write!(f, "Tm_{i}"),
            Var::L(i) => write!(f, "L_{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// Constraint family a row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    NoSelfLoop,
    StartEnd,
    NoInOutDepots,
    FlowConservation,
    OutDegree,
    InDegree,
    PairVisit,
    RouteLength,
    LengthCompat,
    Precedence,
    StartLoad,
    PickupLoad,
    DeliveryLoad,
    EndLoad,
}

impl Family {
    fn prefix(self) -> &'static str {
        match self {
            Family::NoSelfLoop => "noself",
            Family::StartEnd => "startend",
            Family::NoInOutDepots => "noinout",
            Family::FlowConservation => "flow",
            Family::OutDegree => "outdeg",
            Family::InDegree => "indeg",
            Family::PairVisit => "pair",
            Family::RouteLength => "routelen",
            Family::LengthCompat => "compat",
            Family::Precedence => "prec",
            Family::StartLoad => "load0",
            Family::PickupLoad => "loadpick",
            Family::DeliveryLoad => "loaddel",
            Family::EndLoad => "loadend",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(Var, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn lhs(&self, a: &Assignment) -> f64 {
        self.terms.iter().map(|&(v, c)| c * a.value(v)).sum()
    }

    /// Amount by which the row is violated (0 when satisfied).
    pub fn violation(&self, a: &Assignment) -> f64 {
        let lhs = self.lhs(a);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Values for every model variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub x: Vec<Vec<f64>>,
    pub t: Vec<f64>,
    pub l: Vec<f64>,
}

impl Assignment {
    pub fn value(&self, v: Var) -> f64 {
        match v {
            Var::X(i, j) => self.x[i][j],
            Var::T(i) => self.t[i],
            Var::L(i) => self.l[i],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub num_vertices: usize,
    /// Revenue collected per traversed arc leaving a pickup (maximized).
    pub objective: Vec<(Var, f64)>,
    pub rows: Vec<Row>,
    pub capacity: f64,
    pub big_m_length: f64,
    pub big_m_load: f64,
}

impl MilpModel {
    pub fn num_binaries(&self) -> usize {
        self.num_vertices * self.num_vertices
    }

    pub fn num_continuous(&self) -> usize {
        2 * self.num_vertices
    }

    pub fn rows_in(&self, family: Family) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.family == family)
    }

    /// The induced assignment of a route: traversed arcs set to one,
    /// cumulative lengths and departure loads along the route, zero elsewhere.
    pub fn assignment_for<S: Scalar>(&self, inst: &Instance<S>, route: &Route<S>) -> Assignment {
        let v = self.num_vertices;
        let mut a = Assignment {
            x: vec![vec![0.0; v]; v],
            t: vec![0.0; v],
            l: vec![0.0; v],
        };
        let seq = route.seq();
        let mut cumulative = 0.0;
        for w in seq.windows(2) {
            a.x[w[0]][w[1]] = 1.0;
            cumulative += inst.dist(w[0], w[1]).as_f64();
            a.t[w[1]] = cumulative;
        }
        for (&vertex, load) in seq.iter().zip(load_profile(inst, seq)) {
            a.l[vertex] = load as f64;
        }
        a
    }

    /// Rows (and variable bounds, reported under their family) violated by
    /// more than `tol`.
    pub fn violations(&self, a: &Assignment, tol: f64) -> Vec<String> {
        let mut out: Vec<String> = self
            .rows
            .iter()
            .filter(|r| r.violation(a) > tol)
            .map(|r| r.name.clone())
            .collect();
        for i in 0..self.num_vertices {
            if a.l[i] < -tol || a.l[i] > self.capacity + tol {
                out.push(format!("bound_L_{i}"));
            }
            if a.t[i] < -tol {
                out.push(format!("bound_Tm_{i}"));
            }
            for j in 0..self.num_vertices {
                let x = a.x[i][j];
                if x.abs() > tol && (x - 1.0).abs() > tol {
                    out.push(format!("binary_X_{i}_{j}"));
                }
            }
        }
        out
    }

    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let v = self.num_vertices;
        let _ = writeln!(out, "\\ selective pickup-and-delivery TSP, {} vertices", v);
        out.push_str("Maximize\n obj:");
        if self.objective.is_empty() {
            out.push_str(" 0 X_0_0");
        } else {
            write_terms(&mut out, &self.objective);
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            write_terms(&mut out, &row.terms);
            let _ = writeln!(out, " {} {}", row.sense.symbol(), row.rhs);
        }
        out.push_str("Bounds\n");
        for i in 0..v {
            let _ = writeln!(out, " 0 <= L_{i} <= {}", self.capacity);
        }
        for i in 0..v {
            let _ = writeln!(out, " Tm_{i} >= 0");
        }
        out.push_str("Binary\n");
        for i in 0..v {
            let names: Vec<String> = (0..v).map(|j| Var::X(i, j).to_string()).collect();
            let _ = writeln!(out, " {}", names.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

fn write_terms(out: &mut String, terms: &[(Var, f64)]) {
    for (k, &(var, coef)) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        if coef < 0.0 {
            let _ = write!(out, " - {} {var}", -coef);
        } else {
            let _ = write!(out, " + {coef} {var}");
        }
    }
}

struct Builder {
    rows: Vec<Row>,
}

impl Builder {
    fn add(&mut self, family: Family, tag: String, terms: Vec<(Var, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row {
            name: format!("{}_{tag}", family.prefix()),
            family,
            terms,
            sense,
            rhs,
        });
    }
}

pub fn export_milp<S: Scalar>(inst: &Instance<S>) -> MilpModel {
    let n = inst.n();
    let v = inst.num_vertices();
    let (start, end) = (inst.start(), inst.end());
    let pickups = 1..=n;
    let deliveries = n + 1..=2 * n;
    let c = |i: usize, j: usize| inst.dist(i, j).as_f64();
    let t_max = inst.max_length().as_f64();
    let q_cap = f64::from(inst.capacity());

    let max_arc = (0..v)
        .flat_map(|i| (0..v).map(move |j| (i, j)))
        .map(|(i, j)| c(i, j))
        .fold(0.0, f64::max);
    let big_t = t_max + max_arc;
    let big_l = q_cap + f64::from(inst.max_demand());

    let objective = pickups
        .clone()
        .flat_map(|h| {
            let r = inst.revenue_of(h).as_f64();
            (0..v).filter(move |&j| j != h).map(move |j| (Var::X(h, j), r))
        })
        .collect();

    let mut b = Builder { rows: Vec::new() };
    let out_arcs = |i: usize| (0..v).map(move |j| (Var::X(i, j), 1.0));
    let in_arcs = |j: usize| (0..v).map(move |i| (Var::X(i, j), 1.0));

    for i in 0..v {
        b.add(Family::NoSelfLoop, i.to_string(), vec![(Var::X(i, i), 1.0)], Sense::Eq, 0.0);
    }
    b.add(
        Family::StartEnd,
        "start".into(),
        pickups.clone().map(|j| (Var::X(start, j), 1.0)).collect(),
        Sense::Eq,
        1.0,
    );
    b.add(
        Family::StartEnd,
        "end".into(),
        deliveries.clone().map(|i| (Var::X(i, end), 1.0)).collect(),
        Sense::Eq,
        1.0,
    );
    b.add(Family::NoInOutDepots, "start".into(), in_arcs(start).collect(), Sense::Eq, 0.0);
    b.add(Family::NoInOutDepots, "end".into(), out_arcs(end).collect(), Sense::Eq, 0.0);
    for i in 1..=2 * n {
        let mut terms: Vec<(Var, f64)> = out_arcs(i).collect();
        terms.extend(in_arcs(i).map(|(var, _)| (var, -1.0)));
        b.add(Family::FlowConservation, i.to_string(), terms, Sense::Eq, 0.0);
    }
    for i in (0..v).filter(|&i| i != end) {
        b.add(Family::OutDegree, i.to_string(), out_arcs(i).collect(), Sense::Le, 1.0);
    }
    for j in (0..v).filter(|&j| j != start) {
        b.add(Family::InDegree, j.to_string(), in_arcs(j).collect(), Sense::Le, 1.0);
    }
    for h in pickups.clone() {
        let mut terms: Vec<(Var, f64)> = out_arcs(h).collect();
        terms.extend(in_arcs(h + n).map(|(var, _)| (var, -1.0)));
        b.add(Family::PairVisit, h.to_string(), terms, Sense::Eq, 0.0);
    }
    b.add(Family::RouteLength, "start".into(), vec![(Var::T(start), 1.0)], Sense::Eq, 0.0);
    b.add(Family::RouteLength, "end".into(), vec![(Var::T(end), 1.0)], Sense::Le, t_max);

    // T_j >= T_i + c_ij - M_T (1 - X_ij)
    for i in 0..v {
        for j in (0..v).filter(|&j| j != i) {
            b.add(
                Family::LengthCompat,
                format!("{i}_{j}"),
                vec![(Var::T(j), 1.0), (Var::T(i), -1.0), (Var::X(i, j), -big_t)],
                Sense::Ge,
                c(i, j) - big_t,
            );
        }
    }
    // T_{h+n} >= T_h - M_T (1 - sum_j X_hj)
    for h in pickups.clone() {
        let mut terms = vec![(Var::T(h + n), 1.0), (Var::T(h), -1.0)];
        terms.extend(out_arcs(h).map(|(var, _)| (var, -big_t)));
        b.add(Family::Precedence, h.to_string(), terms, Sense::Ge, -big_t);
    }
    b.add(Family::StartLoad, "0".into(), vec![(Var::L(start), 1.0)], Sense::Eq, 0.0);
    // X_ij = 1  =>  L_j = L_i +/- q
    let mut load_rows = |family: Family, j: usize, delta: f64| {
        for i in (0..v).filter(|&i| i != j) {
            b.add(
                family,
                format!("{i}_{j}_le"),
                vec![(Var::L(j), 1.0), (Var::L(i), -1.0), (Var::X(i, j), big_l)],
                Sense::Le,
                delta + big_l,
            );
            b.add(
                family,
                format!("{i}_{j}_ge"),
                vec![(Var::L(j), 1.0), (Var::L(i), -1.0), (Var::X(i, j), -big_l)],
                Sense::Ge,
                delta - big_l,
            );
        }
    };
    for j in pickups.clone() {
        load_rows(Family::PickupLoad, j, f64::from(inst.demand_of(j)));
    }
    for j in deliveries.clone() {
        load_rows(Family::DeliveryLoad, j, -f64::from(inst.demand_of(j - n)));
    }
    b.add(Family::EndLoad, end.to_string(), vec![(Var::L(end), 1.0)], Sense::Eq, 0.0);

    MilpModel {
        num_vertices: v,
        objective,
        rows: b.rows,
        capacity: q_cap,
        big_m_length: big_t,
        big_m_load: big_l,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RevenueSetting;

    fn one_request() -> Instance<f64> {
        Instance::new(
            1,
            vec![[0.0, 0.0], [0.0, 0.5], [0.5, 0.5], [0.5, 0.0]],
            vec![3],
            vec![0.25],
            5,
            2.0,
            RevenueSetting::Uniform,
            0,
        )
        .unwrap()
    }

    /// Row count per family for `n` requests, `v = 2n + 2` vertices.
    fn expected_rows(n: usize) -> Vec<(Family, usize)> {
        let v = 2 * n + 2;
        vec![
            (Family::NoSelfLoop, v),
            (Family::StartEnd, 2),
            (Family::NoInOutDepots, 2),
            (Family::FlowConservation, 2 * n),
            (Family::OutDegree, v - 1),
            (Family::InDegree, v - 1),
            (Family::PairVisit, n),
            (Family::RouteLength, 2),
            (Family::LengthCompat, v * (v - 1)),
            (Family::Precedence, n),
            (Family::StartLoad, 1),
            (Family::PickupLoad, 2 * (v - 1) * n),
            (Family::DeliveryLoad, 2 * (v - 1) * n),
            (Family::EndLoad, 1),
        ]
    }

    #[test]
    fn single_request_row_counts() {
        let model = export_milp(&one_request());
        let mut total = 0;
        for (family, count) in expected_rows(1) {
            assert_eq!(model.rows_in(family).count(), count, "{family:?}");
            total += count;
        }
        assert_eq!(total, 46);
        assert_eq!(model.rows.len(), 46);
        assert_eq!(model.num_binaries(), 16);
        assert_eq!(model.num_continuous(), 8);
    }

    #[test]
    fn objective_collects_pickup_departures() {
        let model = export_milp(&one_request());
        assert_eq!(
            model.objective,
            vec![(Var::X(1, 0), 0.25), (Var::X(1, 2), 0.25), (Var::X(1, 3), 0.25)]
        );
        let lp = model.to_lp();
        assert!(lp.contains("Maximize\n obj: + 0.25 X_1_0 + 0.25 X_1_2 + 0.25 X_1_3\n"));
    }

    #[test]
    fn diagonal_fixed_to_zero() {
        let model = export_milp(&one_request());
        let lp = model.to_lp();
        for i in 0..4 {
            assert!(lp.contains(&format!(" noself_{i}: + 1 X_{i}_{i} = 0\n")));
        }
    }

    #[test]
    fn lp_sections_present() {
        let lp = export_milp(&one_request()).to_lp();
        let order: Vec<usize> = ["Maximize", "Subject To", "Bounds", "Binary", "End"]
            .iter()
            .map(|s| lp.find(s).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(lp.contains(" 0 <= L_2 <= 5\n"));
        assert!(lp.contains("Tm_3"));
    }

    #[test]
    fn big_m_constants() {
        let inst = one_request();
        let model = export_milp(&inst);
        let diag = 0.5f64.hypot(0.5);
        assert!((model.big_m_length - (2.0 + diag)).abs() < 1e-12);
        assert_eq!(model.big_m_load, 8.0);
    }

    #[test]
    fn feasible_routes_satisfy_all_rows() {
        let inst = one_request();
        let model = export_milp(&inst);
        let route = Route::new(&inst, vec![0, 1, 2, 3]).unwrap();
        let a = model.assignment_for(&inst, &route);
        assert!(model.violations(&a, 1e-9).is_empty());
    }

    #[test]
    fn start_and_end_rows_require_one_served_request() {
        let inst = one_request();
        let model = export_milp(&inst);
        let a = model.assignment_for(&inst, &Route::empty(&inst));
        let bad = model.violations(&a, 1e-9);
        assert_eq!(bad, vec!["startend_start".to_string(), "startend_end".to_string()]);
    }

    #[test]
    fn infeasible_assignment_is_caught() {
        let inst = one_request();
        let model = export_milp(&inst);
        let route = Route::new(&inst, vec![0, 1, 2, 3]).unwrap();
        let mut a = model.assignment_for(&inst, &route);
        a.l[1] = 1.0; // load after pickup should be 3
        let bad = model.violations(&a, 1e-9);
        assert!(bad.iter().any(|r| r.starts_with("loadpick_0_1")), "{bad:?}");
    }
}
