use crate::model::Instance;
use crate::scalar::Scalar;

fn path_length<S: Scalar>(inst: &Instance<S>, path: &[usize]) -> S {
    path.windows(2)
        .fold(S::zero(), |acc, w| acc + inst.dist(w[0], w[1]))
}

/// Path `start -> mids... -> end` visiting mids in nearest-neighbor order.
pub fn nearest_neighbor_path<S: Scalar>(
    inst: &Instance<S>,
    start: usize,
    end: usize,
    mids: &[usize],
) -> (Vec<usize>, S) {
    let mut left: Vec<usize> = mids.to_vec();
    left.sort_unstable();
    let mut path = Vec::with_capacity(mids.len() + 2);
    path.push(start);
    let mut cur = start;
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .fold((0, S::infinity()), |(bk, bd), (k, &v)| {
                let d = inst.dist(cur, v);
                if d < bd {
                    (k, d)
                } else {
                    (bk, bd)
                }
            });
        cur = left.remove(k);
        path.push(cur);
    }
    path.push(end);
    let len = path_length(inst, &path);
    (path, len)
}

/// Fixed-endpoint Hamiltonian path through `mids`: nearest-neighbor start,
/// then best-improvement segment reversals until none shortens the path.
///
/// The result is an upper bound on the shortest such path, so a length
/// within budget certifies that the mids can still be served.
pub fn two_opt_path<S: Scalar>(
    inst: &Instance<S>,
    start: usize,
    end: usize,
    mids: &[usize],
) -> (Vec<usize>, S) {
    let (mut path, _) = nearest_neighbor_path(inst, start, end, mids);
    let eps = S::improvement_eps() * S::lit(1e-3);
    let last = path.len() - 1;
    loop {
        let mut best = (S::zero(), 0, 0);
        for i in 1..last {
            for j in i + 1..last {
                let delta = inst.dist(path[i - 1], path[j]) + inst.dist(path[i], path[j + 1])
                    - inst.dist(path[i - 1], path[i])
                    - inst.dist(path[j], path[j + 1]);
                if delta < best.0 - eps {
                    best = (delta, i, j);
                }
            }
        }
        if best.1 == 0 {
            break;
        }
        path[best.1..=best.2].reverse();
    }
    let len = path_length(inst, &path);
    (path, len)
}
