//! Minimum-genus search over rotation systems, for small graphs.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{euler_genus, genus_lower_bound, validate, Embedding, EmbeddingCertificate};
use crate::error::{Error, Result};
use crate::graph::{is_bipartite, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_rotation_systems: u64,
    pub seed: u64,
    pub target_genus: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_rotation_systems: 10_000_000,
            seed: 0,
            target_genus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_genus: u64,
    pub witness: Embedding,
    pub exhaustive: bool,
    pub explored: u64,
}

/// Darts grouped by tail; dart `offset[v] + k` is `v -> neighbors(v)[k]`.
struct DartSpace {
    offset: Vec<usize>,
    rev: Vec<u32>,
}

impl DartSpace {
    fn new(g: &Graph) -> Self {
        let mut offset = Vec::with_capacity(g.n() + 1);
        offset.push(0);
        for v in g.vertices() {
            offset.push(offset[v.index()] + g.degree(v));
        }
        let mut rev = vec![0u32; offset[g.n()]];
        for v in g.vertices() {
            for (k, &u) in g.neighbors(v).iter().enumerate() {
                let back = g
                    .neighbors(u)
                    .binary_search(&v)
                    .expect("symmetric adjacency");
                rev[offset[v.index()] + k] = (offset[u.index()] + back) as u32;
            }
        }
        DartSpace { offset, rev }
    }

    fn darts(&self) -> usize {
        self.rev.len()
    }

    /// Writes the rotation `order` (neighbor positions in cyclic order) of `v`.
    fn set(&self, sigma: &mut [u32], v: usize, order: &[u32]) {
        let base = self.offset[v];
        let d = order.len();
        for i in 0..d {
            sigma[base + order[i] as usize] = (base + order[(i + 1) % d] as usize) as u32;
        }
    }

    fn count_faces(&self, sigma: &[u32], seen: &mut [u32], stamp: u32) -> usize {
        let mut faces = 0;
        for start in 0..sigma.len() {
            if seen[start] == stamp {
                continue;
            }
            faces += 1;
            let mut d = start;
            while seen[d] != stamp {
                seen[d] = stamp;
                d = sigma[self.rev[d] as usize] as usize;
            }
        }
        faces
    }
}

fn rotation_from_orders(g: &Graph, orders: &[&[u32]]) -> Vec<Vec<VertexId>> {
    g.vertices()
        .map(|v| {
            orders[v.index()]
                .iter()
                .map(|&k| g.neighbors(v)[k as usize])
                .collect()
        })
        .collect()
}

fn genus_of(n: usize, m: usize, f: usize) -> u64 {
    ((2 + m - n - f) / 2) as u64
}

/// `∏_v (deg(v) - 1)!`, the number of rotation systems.
pub fn rotation_space_size(g: &Graph) -> u128 {
    g.vertices()
        .map(|v| (1..g.degree(v).max(1) as u128).product::<u128>())
        .try_fold(1u128, |acc, x| acc.checked_mul(x))
        .unwrap_or(u128::MAX)
}

fn cyclic_orders(d: usize) -> Vec<Vec<u32>> {
    fn extend(cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for k in 1..used.len() {
            if !used[k] {
                used[k] = true;
                cur.push(k as u32);
                extend(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut used = vec![false; d];
    used[0] = true;
    let mut out = Vec::new();
    extend(&mut vec![0], &mut used, &mut out);
    out
}

/// Largest face count any embedding of `g` can reach.
fn face_ceiling(g: &Graph) -> usize {
    let lb = match genus_lower_bound(g) {
        Ok(lb) => lb,
        Err(_) => {
            let (n, m) = (g.n() as i64, g.m() as i64);
            num_integer::Integer::div_ceil(&(6 + m - 3 * n), &6).max(0) as u64
        }
    };
    (2 + g.m() - g.n()) - 2 * lb as usize
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.n() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let c = g.components().len();
    if c > 1 {
        return Err(Error::Disconnected { components: c });
    }
    Ok(())
}

/// Enumerates every rotation system up to global mirror image. Reaching the
/// Euler lower bound ends the search early at the first such system in
/// enumeration order.
pub fn exhaustive_min_genus(g: &Graph, budget: SearchBudget) -> Result<OracleResult> {
    require_connected(g)?;
    let needed = rotation_space_size(g);
    if needed > budget.max_rotation_systems as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: budget.max_rotation_systems,
        });
    }
    let ds = DartSpace::new(g);
    let pivot = g
        .vertices()
        .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)));
    let options: Vec<Vec<Vec<u32>>> = g
        .vertices()
        .map(|v| {
            let d = g.degree(v);
            let all = cyclic_orders(d);
            if Some(v) == pivot && d >= 3 {
                all.into_iter().filter(|o| o[1] < o[d - 1]).collect()
            } else {
                all
            }
        })
        .collect();
    let radix: Vec<u64> = options.iter().map(|o| o.len() as u64).collect();
    let total: u64 = radix.iter().product();
    let ceiling = face_ceiling(g);

    const CHUNKS: u64 = 256;
    let chunk = total.div_ceil(CHUNKS).max(1);
    let found = AtomicU64::new(u64::MAX);
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .filter_map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            if start > found.load(Ordering::Relaxed) {
                return None;
            }
            let mut digits = vec![0u64; radix.len()];
            let mut rest = start;
            for (dg, &r) in digits.iter_mut().zip(&radix) {
                *dg = rest % r;
                rest /= r;
            }
            let mut sigma = vec![0u32; ds.darts()];
            for (v, dg) in digits.iter().enumerate() {
                ds.set(&mut sigma, v, &options[v][*dg as usize]);
            }
            let mut seen = vec![0u32; ds.darts()];
            let mut local: Option<(usize, u64)> = None;
            for idx in start..end {
                let stamp = (idx - start + 1) as u32;
                let f = ds.count_faces(&sigma, &mut seen, stamp);
                if local.is_none_or(|(bf, _)| f > bf) {
                    local = Some((f, idx));
                    if f == ceiling {
                        found.fetch_min(idx, Ordering::Relaxed);
                        break;
                    }
                }
                for (v, dg) in digits.iter_mut().enumerate() {
                    *dg += 1;
                    if *dg < radix[v] {
                        ds.set(&mut sigma, v, &options[v][*dg as usize]);
                        break;
                    }
                    *dg = 0;
                    ds.set(&mut sigma, v, &options[v][0]);
                }
            }
            local
        })
        .reduce_with(|a, b| {
            if (b.0, std::cmp::Reverse(b.1)) > (a.0, std::cmp::Reverse(a.1)) {
                b
            } else {
                a
            }
        })
        .expect("at least one rotation system");

    let (f, idx) = best;
    let mut rest = idx;
    let orders: Vec<&[u32]> = radix
        .iter()
        .zip(&options)
        .map(|(&r, opts)| {
            let o = &opts[(rest % r) as usize];
            rest /= r;
            o.as_slice()
        })
        .collect();
    let witness = Embedding::new(g.clone(), rotation_from_orders(g, &orders))?;
    Ok(OracleResult {
        best_genus: genus_of(g.n(), g.m(), f),
        witness,
        exhaustive: true,
        explored: if f == ceiling { idx + 1 } else { total },
    })
}

const RESTARTS_PER_BATCH: u64 = 8;
const STEPS_PER_RESTART: u64 = 20_000;

struct Restart {
    faces: usize,
    orders: Vec<Vec<u32>>,
    explored: u64,
}

fn anneal(g: &Graph, ds: &DartSpace, seed: u64, steps: u64, stop_faces: usize) -> Restart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orders: Vec<Vec<u32>> = g
        .vertices()
        .map(|v| {
            let mut o: Vec<u32> = (0..g.degree(v) as u32).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();
    let movable: Vec<usize> = g
        .vertices()
        .filter(|&v| g.degree(v) >= 3)
        .map(VertexId::index)
        .collect();
    let mut sigma = vec![0u32; ds.darts()];
    for (v, o) in orders.iter().enumerate() {
        ds.set(&mut sigma, v, o);
    }
    let mut seen = vec![0u32; ds.darts()];
    let mut stamp = 1;
    let mut faces = ds.count_faces(&sigma, &mut seen, stamp);
    let mut best = Restart {
        faces,
        orders: orders.clone(),
        explored: 1,
    };
    if movable.is_empty() || faces >= stop_faces {
        return best;
    }
    for step in 0..steps {
        let v = movable[rng.gen_range(0..movable.len())];
        let d = orders[v].len();
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        orders[v].swap(i, j);
        ds.set(&mut sigma, v, &orders[v]);
        stamp += 1;
        let nf = ds.count_faces(&sigma, &mut seen, stamp);
        best.explored += 1;
        let temp = 1.5 * (1.0 - step as f64 / steps as f64) + 0.05;
        let delta = nf as f64 - faces as f64;
        if delta >= 0.0 || rng.gen::<f64>() < (delta / temp).exp() {
            faces = nf;
            if faces > best.faces {
                best.faces = faces;
                best.orders.clone_from(&orders);
                if faces >= stop_faces {
                    break;
                }
            }
        } else {
            orders[v].swap(i, j);
            ds.set(&mut sigma, v, &orders[v]);
        }
    }
    best
}

/// Seeded simulated annealing on the face count. Runs restarts in batches
/// of 8 until the target genus (or the Euler lower bound) is met or the
/// budget of evaluated rotation systems is spent. The result does not depend
/// on the number of threads.
pub fn stochastic_search(g: &Graph, budget: SearchBudget) -> Result<OracleResult> {
    require_connected(g)?;
    let ds = DartSpace::new(g);
    let ceiling = face_ceiling(g);
    let floor_genus = genus_of(g.n(), g.m(), ceiling);
    let stop_genus = budget.target_genus.unwrap_or(floor_genus).max(floor_genus);
    let stop_faces = (2 + g.m() - g.n()) - 2 * stop_genus as usize;
    let per_batch = RESTARTS_PER_BATCH * STEPS_PER_RESTART;
    let batches = budget.max_rotation_systems.div_ceil(per_batch).max(1);

    let mut best: Option<(Restart, u64)> = None;
    let mut explored = 0;
    for batch in 0..batches {
        let runs: Vec<Restart> = (0..RESTARTS_PER_BATCH)
            .into_par_iter()
            .map(|k| {
                let restart = batch * RESTARTS_PER_BATCH + k;
                anneal(
                    g,
                    &ds,
                    budget.seed.wrapping_add(restart),
                    STEPS_PER_RESTART,
                    stop_faces,
                )
            })
            .collect();
        for (k, run) in runs.into_iter().enumerate() {
            explored += run.explored;
            if best.as_ref().is_none_or(|(b, _)| run.faces > b.faces) {
                best = Some((run, batch * RESTARTS_PER_BATCH + k as u64));
            }
        }
        if best.as_ref().is_some_and(|(b, _)| b.faces >= stop_faces) {
            break;
        }
    }
    let (run, _) = best.expect("at least one restart");
    let orders: Vec<&[u32]> = run.orders.iter().map(Vec::as_slice).collect();
    let witness = Embedding::new(g.clone(), rotation_from_orders(g, &orders))?;
    let best_genus = genus_of(g.n(), g.m(), run.faces);
    if let Ok(lb) = genus_lower_bound(g) {
        assert!(best_genus >= lb, "search beat the Euler lower bound");
    }
    Ok(OracleResult {
        best_genus,
        witness,
        exhaustive: false,
        explored,
    })
}

/// Certificate of `e` for the bipartite graph `g`; `minimal` records whether
/// the genus meets the quadrilateral lower bound.
pub fn certify_minimum(g: &Graph, e: &Embedding) -> Result<EmbeddingCertificate> {
    if is_bipartite(g).is_none() {
        return Err(Error::NotApplicable(
            "certify_minimum needs a bipartite graph".into(),
        ));
    }
    let eg = e.graph();
    if eg.n() != g.n() || !eg.edges().eq(g.edges()) {
        return Err(Error::InvalidEmbedding(
            "embedding is of a different graph".into(),
        ));
    }
    if let Some(v) = validate(e).first() {
        return Err(Error::InvalidEmbedding(v.to_string()));
    }
    let lb = genus_lower_bound(g)?;
    let mut cert = euler_genus(e)?;
    cert.lower_bound = lb;
    cert.minimal = cert.genus == lb;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cartesian_product, make_complete, make_complete_bipartite, make_cycle};

    fn check_witness(g: &Graph, r: &OracleResult) {
        assert!(validate(&r.witness).is_empty());
        assert_eq!(r.witness.graph(), g);
        assert_eq!(euler_genus(&r.witness).unwrap().genus, r.best_genus);
    }

    #[test]
    fn space_sizes() {
        assert_eq!(
            rotation_space_size(&make_complete_bipartite(3, 3).unwrap()),
            64
        );
        assert_eq!(rotation_space_size(&make_complete(5).unwrap()), 7776);
        assert_eq!(
            rotation_space_size(&make_complete_bipartite(4, 4).unwrap()),
            6u128.pow(8)
        );
        assert_eq!(cyclic_orders(4).len(), 6);
    }

    #[test]
    fn exhaustive_small_graphs() {
        for (g, genus) in [
            (make_complete(4).unwrap(), 0),
            (make_complete_bipartite(3, 3).unwrap(), 1),
            (make_complete(5).unwrap(), 1),
            (make_complete_bipartite(2, 2).unwrap(), 0),
            (make_complete(3).unwrap(), 0),
        ] {
            let r = exhaustive_min_genus(&g, SearchBudget::default()).unwrap();
            assert_eq!(r.best_genus, genus);
            assert!(r.exhaustive);
            check_witness(&g, &r);
        }
    }

    #[test]
    fn exhaustive_k44_is_torus() {
        let g = make_complete_bipartite(4, 4).unwrap();
        let r = exhaustive_min_genus(&g, SearchBudget::default()).unwrap();
        assert_eq!(r.best_genus, 1);
        check_witness(&g, &r);
    }

    #[test]
    fn budget_is_enforced() {
        let g = make_complete(5).unwrap();
        let b = SearchBudget {
            max_rotation_systems: 1000,
            ..SearchBudget::default()
        };
        assert!(matches!(
            exhaustive_min_genus(&g, b),
            Err(Error::BudgetExceeded {
                needed: 7776,
                budget: 1000
            })
        ));
    }

    #[test]
    fn stochastic_reaches_lower_bound() {
        let c4 = make_cycle(4).unwrap();
        let r = stochastic_search(&c4, SearchBudget::default()).unwrap();
        assert_eq!(r.best_genus, 0);
        assert_eq!(r.explored, RESTARTS_PER_BATCH);

        let b = SearchBudget {
            target_genus: Some(1),
            ..SearchBudget::default()
        };
        for g in [
            make_complete_bipartite(4, 4).unwrap(),
            cartesian_product(&c4, &c4).unwrap(),
        ] {
            let r = stochastic_search(&g, b).unwrap();
            assert_eq!(r.best_genus, 1);
            assert!(!r.exhaustive);
            check_witness(&g, &r);
            assert!(certify_minimum(&g, &r.witness).unwrap().minimal);
        }
    }

    #[test]
    fn stochastic_is_deterministic() {
        let g = make_complete(6).unwrap();
        let b = SearchBudget {
            max_rotation_systems: 200_000,
            seed: 7,
            target_genus: None,
        };
        assert_eq!(
            stochastic_search(&g, b).unwrap(),
            stochastic_search(&g, b).unwrap()
        );
    }

    #[test]
    fn certify_rejects_foreign_and_nonbipartite() {
        let k5 = make_complete(5).unwrap();
        let e = Embedding::with_sorted_rotation(k5.clone());
        assert!(matches!(
            certify_minimum(&k5, &e),
            Err(Error::NotApplicable(_))
        ));
        let c4 = make_cycle(4).unwrap();
        let c6 = make_cycle(6).unwrap();
        let e = Embedding::with_sorted_rotation(c6);
        assert!(matches!(
            certify_minimum(&c4, &e),
            Err(Error::InvalidEmbedding(_))
        ));
    }
}
