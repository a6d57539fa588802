//! Zeros of a variety on the maximal compact subgroup.
//!
//! The system is pulled back along the Betti parametrisation to a map
//! `F : [0,1)^{2g} → ℂ^m`. Its scale-free modulus is sampled on a shifted
//! grid; grid nodes that are local minima below an adaptive threshold seed
//! a damped Gauss–Newton refinement on the real and imaginary parts. Refined
//! points are deduplicated, put in canonical order, clustered, and examined
//! for torsion and for integer linear relations.
//!
//! Completeness is only relative to the grid: a report claims that no other
//! zeros were found at the resolutions it lists.

mod executor;
mod relations;

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use executor::{Executor, Sequential};
pub use relations::{
    detect_subtorus, detect_torsion, hermite_basis, subtorus_relations, torsion_order, Relation,
};

use crate::extension::{frac, torus_distance, BettiPoint, Chart, ExtensionConfig, UEPoint};
use crate::linalg::damped_step;
use crate::variety::VarietySpec;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Grid nodes per Betti coordinate.
    pub resolution: usize,
    /// Acceptance bound on the scale-free variety residual.
    pub tol: f64,
    /// Seeds the grid offset.
    pub seed: u64,
    /// Largest admissible number of real variables `2g`.
    pub max_dim: usize,
    pub max_nodes: u128,
    /// Spawn threshold factor against the local variation of the residual.
    pub kappa: f64,
    pub max_iter: usize,
    /// Central difference step for the Jacobian.
    pub fd_step: f64,
    /// Refinements beyond this many seeds are dropped, keeping the seeds
    /// with the smallest grid residual.
    pub max_seeds: usize,
    /// Height bound for relation search.
    pub height: i64,
    /// Denominator bound for torsion detection.
    pub qmax: u64,
    pub relation_tol: f64,
    pub torsion_tol: f64,
    /// Number of grid samples copied into the report for plotting.
    pub max_samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            resolution: 64,
            tol: 1e-10,
            seed: 0,
            max_dim: 6,
            max_nodes: 1 << 25,
            kappa: 4.0,
            max_iter: 100,
            fd_step: 1e-6,
            max_seeds: 100_000,
            height: 3,
            qmax: 100,
            relation_tol: 1e-6,
            torsion_tol: 1e-7,
            max_samples: 1 << 16,
        }
    }
}

impl SolverOptions {
    /// Torus radius within which refined points count as one solution.
    pub fn dedup_radius(&self) -> f64 {
        (10.0 * self.tol).max(self.tol.sqrt())
    }

    /// Single-linkage radius for clustering, a few grid spacings.
    pub fn cluster_radius(&self) -> f64 {
        3.0 / self.resolution as f64
    }

    fn validate(&self, g: usize) -> Result<u128> {
        let dim = 2 * g;
        if dim > self.max_dim {
            return Err(Error::DimensionGuard {
                dim,
                limit: self.max_dim,
            });
        }
        if self.resolution < 2 {
            return Err(Error::InvalidArgument(
                "resolution must be at least 2".into(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let nodes = (self.resolution as u128)
            .checked_pow(dim as u32)
            .unwrap_or(u128::MAX);
        if nodes > self.max_nodes {
            return Err(Error::GridTooLarge {
                nodes,
                limit: self.max_nodes,
            });
        }
        Ok(nodes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub betti: BettiPoint,
    pub point: UEPoint,
    /// Largest scale-free variety residual.
    pub residual: f64,
    /// Largest Betti residual `|w + pη₁ + qη₂|` over the factors.
    pub compact_residual: f64,
    pub refined: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Indices into the solution list.
    pub members: Vec<usize>,
    /// Integer relations shared by all members (only for clusters of at
    /// least two points).
    pub relations: Vec<Relation>,
    /// `2g` minus the number of independent relations; 0 for isolated
    /// points.
    pub dimension: usize,
}

/// One grid node and its scale-free residual norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub coords: Vec<f64>,
    pub residual: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionReport {
    pub solutions: Vec<Solution>,
    pub clusters: Vec<Cluster>,
    /// Order of each solution as a torsion point, if detected.
    pub torsion: Vec<Option<u64>>,
    pub resolutions_used: Vec<usize>,
    pub grid_nodes: u128,
    pub seeds: usize,
    pub dropped_seeds: usize,
    pub failed_seeds: usize,
    pub min_grid_residual: f64,
    /// All nodes for `g = 1`, the seed nodes otherwise (up to the sample cap).
    pub samples: Vec<GridSample>,
}

/// The pulled-back residual map of a variety on the Betti torus.
struct ResidualMap<'a> {
    cfg: &'a ExtensionConfig,
    spec: &'a VarietySpec,
}

impl ResidualMap<'_> {
    fn dim(&self) -> usize {
        2 * self.cfg.num_factors()
    }

    fn charts(&self, x: &[f64]) -> Vec<Chart> {
        self.cfg
            .factors()
            .iter()
            .enumerate()
            .map(|(k, f)| f.preferred_chart(x[2 * k], x[2 * k + 1]))
            .collect()
    }

    /// Real and imaginary parts of the system at unit-length
    /// representatives in fixed charts; smooth in `x`.
    fn smooth(&self, x: &[f64], charts: &[Chart], out: &mut Vec<f64>) {
        let coords: Vec<[C64; 5]> = self
            .cfg
            .factors()
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let y = f.projective(x[2 * k], x[2 * k + 1], C64::new(0.0, 0.0), charts[k]);
                let n = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                y.map(|c| c / n)
            })
            .collect();
        out.clear();
        for p in self.spec.polys() {
            let v = p.eval(&coords);
            out.push(v.re);
            out.push(v.im);
        }
    }

    fn norm(&self, x: &[f64]) -> f64 {
        let mut r = Vec::new();
        self.smooth(x, &self.charts(x), &mut r);
        r.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Point and largest scale-free residual at Betti coordinates `x`.
    fn public(&self, x: &[f64]) -> Result<(BettiPoint, UEPoint, f64)> {
        let b = BettiPoint::from_flat(x);
        let pt = self.cfg.betti_to_point(&b)?;
        let r = self
            .spec
            .eval_point(&pt)?
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        Ok((b, pt, r))
    }
}

/// Damped Gauss–Newton from `b0` with a central-difference Jacobian,
/// continued while the residual keeps decreasing. Succeeds when the
/// scale-free residual of the final point is below `tol`.
pub fn refine_newton(
    cfg: &ExtensionConfig,
    spec: &VarietySpec,
    b0: &BettiPoint,
    tol: f64,
    max_iter: usize,
) -> Result<Solution> {
    refine_with_step(
        cfg,
        spec,
        &b0.flat(),
        tol,
        max_iter,
        SolverOptions::default().fd_step,
    )
}

fn refine_with_step(
    cfg: &ExtensionConfig,
    spec: &VarietySpec,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
    h: f64,
) -> Result<Solution> {
    if x0.len() != 2 * cfg.num_factors() || spec.num_factors() != cfg.num_factors() {
        return Err(Error::InvalidArgument(
            "dimension mismatch between point, variety and configuration".into(),
        ));
    }
    let map = ResidualMap { cfg, spec };
    let n = map.dim();
    let mut x = x0.to_vec();
    let mut r = Vec::new();
    let mut rp = Vec::new();
    let mut rm = Vec::new();
    let mut charts = map.charts(&x);
    map.smooth(&x, &charts, &mut r);
    let mut norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut lambda = 1e-6;
    let mut iterations = 0;
    'outer: while iterations < max_iter && norm > 0.0 {
        let m = r.len();
        let mut jac = alloc::vec![0.0; m * n];
        let mut xs = x.clone();
        for t in 0..n {
            xs[t] = x[t] + h;
            map.smooth(&xs, &charts, &mut rp);
            xs[t] = x[t] - h;
            map.smooth(&xs, &charts, &mut rm);
            xs[t] = x[t];
            for i in 0..m {
                jac[i * n + t] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        loop {
            let Some(step) = damped_step(&jac, &r, m, n, lambda) else {
                break 'outer;
            };
            let cand: Vec<f64> = x
                .iter()
                .zip(&step)
                .map(|(a, s)| a + s.clamp(-0.25, 0.25))
                .collect();
            let cnorm = map.norm(&cand);
            if cnorm < norm {
                let size = step.iter().fold(0.0_f64, |a, s| a.max(s.abs()));
                x = cand;
                norm = cnorm;
                charts = map.charts(&x);
                map.smooth(&x, &charts, &mut r);
                lambda = (lambda * 0.1).max(1e-12);
                iterations += 1;
                if size < 1e-15 {
                    break 'outer;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e8 {
                break 'outer;
            }
        }
    }
    let x: Vec<f64> = x.iter().map(|&v| frac(v)).collect();
    let (betti, point, residual) = map.public(&x)?;
    if !(residual < tol) {
        return Err(Error::NoConvergence {
            context: "refining a zero on the compact subgroup",
            residual,
        });
    }
    let (_, res) = cfg.betti_residual(&point)?;
    let compact_residual = res.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(Solution {
        betti,
        point,
        residual,
        compact_residual,
        refined: true,
        iterations,
    })
}

/// Locates `V ∩ 𝒞` on a `resolution^{2g}` grid and classifies it.
///
/// The report is identical for any executor: all parallel stages return
/// results by index and are followed by canonical sorting.
pub fn solve_intersection<E: Executor>(
    cfg: &ExtensionConfig,
    spec: &VarietySpec,
    opts: &SolverOptions,
    exec: &E,
) -> Result<IntersectionReport> {
    let g = cfg.num_factors();
    if spec.num_factors() != g {
        return Err(Error::InvalidArgument(alloc::format!(
            "variety has {} factors, configuration has {g}",
            spec.num_factors()
        )));
    }
    let nodes = opts.validate(g)?;
    let n = 2 * g;
    let res = opts.resolution;
    let total = nodes as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let offsets: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let coord = |t: usize, i: usize| (i as f64 + offsets[t]) / res as f64;

    // Unit max-norm representatives of every factor on its 2-d grid slice.
    let tables: Vec<Vec<[C64; 5]>> = cfg
        .factors()
        .iter()
        .enumerate()
        .map(|(k, f)| {
            exec.map_indexed(res * res, |idx| {
                let (i, j) = (idx % res, idx / res);
                let pt = f.exp_betti(coord(2 * k, i), coord(2 * k + 1, j), C64::new(0.0, 0.0));
                let x = pt.coords();
                let s = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
                x.map(|c| c / s)
            })
        })
        .collect();

    let digits = |mut idx: usize| {
        let mut d = [0usize; 12];
        for t in 0..n {
            d[t] = idx % res;
            idx /= res;
        }
        d
    };
    let chunk = res;
    let chunks = total.div_ceil(chunk);
    let values: Vec<f32> = exec
        .map_indexed(chunks, |c| {
            let mut out = Vec::with_capacity(chunk);
            let mut row: Vec<[C64; 5]> = alloc::vec![[C64::new(0.0, 0.0); 5]; g];
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let d = digits(idx);
                for k in 0..g {
                    row[k] = tables[k][d[2 * k] + res * d[2 * k + 1]];
                }
                let v: f64 = spec
                    .polys()
                    .iter()
                    .map(|p| p.eval(&row).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                out.push(if v.is_finite() {
                    v as f32
                } else {
                    f32::INFINITY
                });
            }
            out
        })
        .concat();

    let mut strides = [1usize; 12];
    for t in 1..n {
        strides[t] = strides[t - 1] * res;
    }
    let spawn: Vec<bool> = exec
        .map_indexed(chunks, |c| {
            let mut out = Vec::with_capacity(chunk);
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let v = values[idx];
                let d = digits(idx);
                let mut is_min = v.is_finite();
                let mut variation = 0.0f32;
                for t in 0..n {
                    let up = if d[t] + 1 == res {
                        idx + strides[t] - res * strides[t]
                    } else {
                        idx + strides[t]
                    };
                    let down = if d[t] == 0 {
                        idx + (res - 1) * strides[t]
                    } else {
                        idx - strides[t]
                    };
                    for nb in [up, down] {
                        let w = values[nb];
                        if w < v {
                            is_min = false;
                        }
                        if w.is_finite() {
                            variation = variation.max((w - v).abs());
                        }
                    }
                }
                out.push(is_min && v <= opts.kappa as f32 * variation);
            }
            out
        })
        .concat();

    let mut seeds: Vec<usize> = (0..total).filter(|&i| spawn[i]).collect();
    let found = seeds.len();
    if seeds.len() > opts.max_seeds {
        seeds.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        seeds.truncate(opts.max_seeds);
        seeds.sort_unstable();
    }
    let min_grid_residual = values.iter().copied().fold(f32::INFINITY, f32::min) as f64;
    let node_coords = |idx: usize| -> Vec<f64> {
        let d = digits(idx);
        (0..n).map(|t| coord(t, d[t])).collect()
    };

    let outcomes: Vec<Result<Solution>> = exec.map_indexed(seeds.len(), |s| {
        refine_with_step(
            cfg,
            spec,
            &node_coords(seeds[s]),
            opts.tol,
            opts.max_iter,
            opts.fd_step,
        )
    });
    let mut failed = 0;
    let mut refined = Vec::new();
    for o in outcomes {
        match o {
            Ok(s) => refined.push(s),
            Err(e) if e.is_numerical() => failed += 1,
            Err(e) => return Err(e),
        }
    }

    let solutions = dedup(refined, opts.dedup_radius());
    let flat: Vec<Vec<f64>> = solutions.iter().map(|s| s.betti.flat()).collect();
    let torsion = flat
        .iter()
        .map(|x| torsion_order(x, opts.qmax, opts.torsion_tol))
        .collect();
    let clusters = cluster(&flat, opts.cluster_radius())
        .into_iter()
        .map(|members| {
            let pts: Vec<Vec<f64>> = members.iter().map(|&i| flat[i].clone()).collect();
            let relations = subtorus_relations(&pts, opts.height, opts.relation_tol);
            let dimension = if members.len() < 2 {
                0
            } else {
                n - relations.len()
            };
            Cluster {
                members,
                relations,
                dimension,
            }
        })
        .collect();

    let samples = if g == 1 {
        (0..total.min(opts.max_samples))
            .map(|i| GridSample {
                coords: node_coords(i),
                residual: values[i],
            })
            .collect()
    } else {
        seeds
            .iter()
            .take(opts.max_samples)
            .map(|&i| GridSample {
                coords: node_coords(i),
                residual: values[i],
            })
            .collect()
    };

    Ok(IntersectionReport {
        solutions,
        clusters,
        torsion,
        resolutions_used: alloc::vec![res],
        grid_nodes: nodes,
        seeds: found,
        dropped_seeds: found - seeds.len(),
        failed_seeds: failed,
        min_grid_residual,
        samples,
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            core::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    core::cmp::Ordering::Equal
}

/// Keeps the best-residual representative of every group of solutions
/// within `radius` of each other, then sorts by Betti coordinates.
fn dedup(mut sols: Vec<Solution>, radius: f64) -> Vec<Solution> {
    let key = |s: &Solution| s.betti.flat();
    sols.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then_with(|| lex_cmp(&key(a), &key(b)))
    });
    let mut kept: Vec<Solution> = Vec::new();
    let mut kept_flat: Vec<Vec<f64>> = Vec::new();
    for s in sols {
        let x = key(&s);
        if kept_flat.iter().all(|y| torus_distance(&x, y) > radius) {
            kept_flat.push(x);
            kept.push(s);
        }
    }
    kept.sort_by(|a, b| lex_cmp(&key(a), &key(b)));
    kept
}

/// Single-linkage components at the given torus radius, each sorted, in
/// order of their smallest member.
fn cluster(points: &[Vec<f64>], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if torus_distance(&points[i], &points[j]) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = alloc::vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Whether two solution lists agree point by point within `tol`.
pub fn same_solution_sets(a: &[Solution], b: &[Solution], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|s| b.iter().any(|t| s.betti.torus_distance(&t.betti) < tol))
        && b.iter()
            .all(|s| a.iter().any(|t| s.betti.torus_distance(&t.betti) < tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_link_transitively() {
        let pts = [
            alloc::vec![0.0, 0.0],
            alloc::vec![0.5, 0.5],
            alloc::vec![0.02, 0.0],
            alloc::vec![0.99, 0.0],
        ];
        assert_eq!(
            cluster(&pts, 0.025),
            alloc::vec![alloc::vec![0, 2, 3], alloc::vec![1]]
        );
    }

    #[test]
    fn guards() {
        let opts = SolverOptions {
            max_dim: 4,
            ..SolverOptions::default()
        };
        assert!(matches!(
            opts.validate(3),
            Err(Error::DimensionGuard { dim: 6, limit: 4 })
        ));
        let opts = SolverOptions {
            resolution: 1000,
            ..SolverOptions::default()
        };
        assert!(matches!(opts.validate(2), Err(Error::GridTooLarge { .. })));
        assert!(SolverOptions::default().validate(1).is_ok());
    }
}
