//! Reference implementations used as test oracles. They share nothing with
//! the library beyond reading instance data.

#![allow(dead_code)]

use pdstsp::Instance;

pub fn dist(inst: &Instance<f64>, i: usize, j: usize) -> f64 {
    let (a, b) = (inst.coords()[i], inst.coords()[j]);
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub feasible: bool,
    pub revenue: f64,
    pub length: f64,
}

/// Straightforward feasibility check of a full route.
pub fn check_route(inst: &Instance<f64>, seq: &[usize]) -> Check {
    let n = inst.n();
    let end = 2 * n + 1;
    let length: f64 = seq.windows(2).map(|w| dist(inst, w[0], w[1])).sum();
    let mut ok = seq.len() >= 2 && seq[0] == 0 && *seq.last().unwrap() == end;
    let mut seen = vec![false; 2 * n + 2];
    let mut load: i64 = 0;
    let mut served = Vec::new();
    for (pos, &v) in seq.iter().enumerate() {
        if v > end || seen[v] {
            ok = false;
            break;
        }
        seen[v] = true;
        if (v == 0 && pos != 0) || (v == end && pos != seq.len() - 1) {
            ok = false;
        }
        if (1..=n).contains(&v) {
            load += i64::from(inst.demands()[v - 1]);
        } else if (n + 1..=2 * n).contains(&v) {
            if !seen[v - n] {
                ok = false;
            }
            load -= i64::from(inst.demands()[v - n - 1]);
            served.push(v - n);
        }
        if load > i64::from(inst.capacity()) {
            ok = false;
        }
    }
    // every pickup must be delivered
    for h in 1..=n {
        if seen[h] != seen.get(h + n).copied().unwrap_or(false) {
            ok = false;
        }
    }
    if length > inst.max_length() + 1e-9 {
        ok = false;
    }
    served.sort_unstable();
    let revenue = served.iter().map(|&h| inst.revenues()[h - 1]).fold(0.0, |a, r| a + r);
    Check {
        feasible: ok,
        revenue,
        length,
    }
}

/// Best revenue over every precedence-respecting ordering of every request
/// subset, without any pruning beyond precedence.
pub fn brute_force_revenue(inst: &Instance<f64>) -> f64 {
    let n = inst.n();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let reqs: Vec<usize> = (1..=n).filter(|h| mask & (1 << (h - 1)) != 0).collect();
        let mut seq = vec![0];
        let mut feasible_found = false;
        permute(inst, &reqs, &mut seq, &mut vec![false; 2 * n + 2], &mut feasible_found);
        if feasible_found {
            let r = check_route(inst, &{
                let mut s = vec![0];
                for &h in &reqs {
                    s.push(h);
                    s.push(h + n);
                }
                s.push(2 * n + 1);
                s
            })
            .revenue;
            best = best.max(r);
        }
    }
    best
}

fn permute(inst: &Instance<f64>, reqs: &[usize], seq: &mut Vec<usize>, used: &mut Vec<bool>, found: &mut bool) {
    if *found {
        return;
    }
    let n = inst.n();
    if seq.len() == 2 * reqs.len() + 1 {
        seq.push(2 * n + 1);
        if check_route(inst, seq).feasible {
            *found = true;
        }
        seq.pop();
        return;
    }
    for &h in reqs {
        for v in [h, h + n] {
            if used[v] || (v == h + n && !used[h]) {
                continue;
            }
            used[v] = true;
            seq.push(v);
            permute(inst, reqs, seq, used, found);
            seq.pop();
            used[v] = false;
        }
    }
}

/// Induced MILP values of a route: arc indicators, arrival lengths and
/// departure loads (zero on unvisited vertices).
pub fn milp_values(inst: &Instance<f64>, seq: &[usize]) -> std::collections::HashMap<String, f64> {
    let nv = 2 * inst.n() + 2;
    let mut vals = std::collections::HashMap::new();
    for i in 0..nv {
        for j in 0..nv {
            vals.insert(format!("X_{i}_{j}"), 0.0);
        }
        vals.insert(format!("Tm_{i}"), 0.0);
        vals.insert(format!("L_{i}"), 0.0);
    }
    let mut t = 0.0;
    let mut load = 0.0;
    for (k, &v) in seq.iter().enumerate() {
        if k > 0 {
            vals.insert(format!("X_{}_{}", seq[k - 1], v), 1.0);
            t += dist(inst, seq[k - 1], v);
            vals.insert(format!("Tm_{v}"), t);
        }
        let n = inst.n();
        if (1..=n).contains(&v) {
            load += f64::from(inst.demands()[v - 1]);
        } else if (n + 1..=2 * n).contains(&v) {
            load -= f64::from(inst.demands()[v - n - 1]);
        }
        vals.insert(format!("L_{v}"), load);
    }
    vals
}

/// Constraint rows of an LP file: `(name, terms, sense, rhs)`.
pub fn parse_lp_rows(lp: &str) -> Vec<(String, Vec<(f64, String)>, String, f64)> {
    let body = lp
        .split("Subject To\n")
        .nth(1)
        .and_then(|s| s.split("Bounds\n").next())
        .expect("constraint section");
    let mut joined: Vec<String> = Vec::new();
    for line in body.lines() {
        if line.split_whitespace().next().is_some_and(|w| w.ends_with(':')) {
            joined.push(line.trim().to_string());
        } else if let Some(last) = joined.last_mut() {
            last.push(' ');
            last.push_str(line.trim());
        }
    }
    joined
        .into_iter()
        .map(|row| {
            let (name, rest) = row.split_once(':').unwrap();
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let mut terms = Vec::new();
            let mut i = 0;
            while i < toks.len() && !["<=", ">=", "="].contains(&toks[i]) {
                let sign = if toks[i] == "-" { -1.0 } else { 1.0 };
                let coef: f64 = toks[i + 1].parse().unwrap();
                terms.push((sign * coef, toks[i + 2].to_string()));
                i += 3;
            }
            let sense = toks[i].to_string();
            let rhs: f64 = toks[i + 1].parse().unwrap();
            (name.to_string(), terms, sense, rhs)
        })
        .collect()
}
