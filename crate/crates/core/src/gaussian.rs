//! Gaussian conditional-independence oracle.
//!
//! `a ⊥ b | C` holds for `N(0, Σ)` iff the partial covariance
//! `Σ_ab − Σ_aC Σ_CC⁻¹ Σ_Cb` vanishes. The zero test is applied to the
//! partial correlation (partial covariance divided by the geometric mean of
//! the two conditional variances), so it is invariant under rescaling of
//! the variables.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::format::CovarianceFile;
use crate::graph::Graph;
use crate::markov::Mode;
use crate::relation::{enumerate_triples, Relation};
use crate::report::{Outcome, Population, VerificationReport, Witness};
use crate::rules::{is_closed, local_family, Rule, Violation};
use crate::triple::Triple;
use crate::vertex::{GroundSet, VertexSet};

pub const DEFAULT_EPS: f64 = 1e-9;

/// Partial correlations in `[eps, NEAR_FACTOR·eps)` are reported as close
/// to the threshold.
pub const NEAR_FACTOR: f64 = 100.0;

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct GaussianModel {
    ground: Arc<GroundSet>,
    sigma: DMatrix<f64>,
    eps: f64,
}

impl GaussianModel {
    /// Validates symmetry and positive definiteness of `sigma`.
    pub fn new(ground: Arc<GroundSet>, sigma: DMatrix<f64>, eps: f64) -> Result<Self> {
        let p = ground.len();
        if sigma.nrows() != p || sigma.ncols() != p {
            return Err(Error::Matrix(format!(
                "expected a {p}x{p} matrix, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Matrix(format!(
                "threshold must be positive, got {eps}"
            )));
        }
        for i in 0..p {
            for j in 0..i {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Matrix(format!(
                        "matrix is not symmetric at ({}, {})",
                        ground.label(i),
                        ground.label(j)
                    )));
                }
            }
        }
        if Cholesky::new(sigma.clone()).is_none() {
            return Err(Error::Matrix("matrix is not positive definite".into()));
        }
        Ok(GaussianModel { ground, sigma, eps })
    }

    pub fn from_rows(ground: Arc<GroundSet>, rows: &[Vec<f64>], eps: f64) -> Result<Self> {
        let p = rows.len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Matrix("rows have unequal lengths".into()));
        }
        let sigma = DMatrix::from_fn(p, p, |i, j| rows[i][j]);
        GaussianModel::new(ground, sigma, eps)
    }

    pub fn from_file(file: &CovarianceFile, eps: f64) -> Result<Self> {
        GaussianModel::from_rows(file.ground.clone(), &file.rows, eps)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn p(&self) -> usize {
        self.ground.len()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.p())
            .map(|i| self.sigma.row(i).iter().copied().collect())
            .collect()
    }

    /// `cΣ`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        GaussianModel::new(self.ground.clone(), &self.sigma * c, self.eps)
    }

    /// Sub-model on the vertices of `keep`, in index order.
    pub fn marginal(&self, keep: VertexSet) -> Result<Self> {
        let idx: Vec<usize> = keep.iter().collect();
        let labels: Vec<&str> = idx.iter().map(|&i| self.ground.label(i)).collect();
        let ground = GroundSet::new(labels)?.shared();
        let sigma = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.sigma[(idx[i], idx[j])]);
        GaussianModel::new(ground, sigma, self.eps)
    }

    /// Partial correlation of `a` and `b` given `C`.
    pub fn partial_correlation(&self, a: usize, b: usize, c: VertexSet) -> Result<f64> {
        let p = self.p();
        for v in [a, b] {
            if v >= p {
                return Err(Error::VertexOutOfRange { index: v, size: p });
            }
        }
        if a == b || c.contains(a) || c.contains(b) {
            return Err(Error::OverlappingSets);
        }
        if !self.ground.contains_set(c) {
            return Err(Error::VertexOutOfRange {
                index: 31 - c.bits().leading_zeros() as usize,
                size: p,
            });
        }
        let s = &self.sigma;
        if c.is_empty() {
            return Ok(s[(a, b)] / (s[(a, a)] * s[(b, b)]).sqrt());
        }
        let idx: Vec<usize> = c.iter().collect();
        let k = idx.len();
        let scc = DMatrix::from_fn(k, k, |i, j| s[(idx[i], idx[j])]);
        let chol = Cholesky::new(scc)
            .ok_or_else(|| Error::Matrix("conditioning block is singular".into()))?;
        let sca = DVector::from_fn(k, |i, _| s[(idx[i], a)]);
        let scb = DVector::from_fn(k, |i, _| s[(idx[i], b)]);
        let xa = chol.solve(&sca);
        let xb = chol.solve(&scb);
        let cov = s[(a, b)] - sca.dot(&xb);
        let var_a = s[(a, a)] - sca.dot(&xa);
        let var_b = s[(b, b)] - scb.dot(&xb);
        if var_a <= 0.0 || var_b <= 0.0 {
            return Err(Error::Matrix("non-positive conditional variance".into()));
        }
        Ok(cov / (var_a * var_b).sqrt())
    }

    /// Whether `a ⊥ b | C` under the zero threshold.
    pub fn ci(&self, a: usize, b: usize, c: VertexSet) -> Result<bool> {
        Ok(self.partial_correlation(a, b, c)?.abs() < self.eps)
    }

    /// The CI structure `[X]`.
    pub fn relation(&self) -> Relation {
        self.relation_with_warnings().0
    }

    /// The CI structure plus one note per pairwise statement whose partial
    /// correlation lies in the near-threshold band.
    ///
    /// Pairwise statements come from the oracle; a composite `(A,B|S)` is
    /// included iff its whole local family is.
    pub fn relation_with_warnings(&self) -> (Relation, Vec<String>) {
        let p = self.p();
        let full = VertexSet::full(p);
        let mut pairwise = Relation::empty(self.ground.clone());
        let mut notes = Vec::new();
        for u in 0..p {
            for v in u + 1..p {
                let (a, b) = (VertexSet::singleton(u), VertexSet::singleton(v));
                for s in (full - a - b).subsets() {
                    let r = self
                        .partial_correlation(u, v, s)
                        .expect("SPD invariant keeps every block invertible")
                        .abs();
                    if r < self.eps {
                        pairwise.insert_unchecked(Triple::canonical(a, b, s));
                    } else if r < NEAR_FACTOR * self.eps {
                        let t = Triple::canonical(a, b, s);
                        notes.push(format!(
                            "near threshold: |rho| = {r:.3e} for ({})",
                            t.display(&self.ground)
                        ));
                    }
                }
            }
        }
        let mut rel = pairwise.clone();
        let mut family = Vec::new();
        for t in enumerate_triples(p).filter(|t| !t.is_pairwise()) {
            local_family(&t, &mut family);
            if family.iter().all(|f| pairwise.contains(f)) {
                rel.insert_unchecked(t);
            }
        }
        (rel, notes)
    }

    /// The model with covariance `Σ⁻¹`.
    pub fn inverse(&self) -> Result<Self> {
        let eig = SymmetricEigen::new(self.sigma.clone());
        let (lo, hi) = eig
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        if lo <= 0.0 || hi / lo > MAX_CONDITION {
            return Err(Error::Matrix(format!(
                "matrix is too ill-conditioned to invert (condition number {:.3e})",
                hi / lo
            )));
        }
        let inv = Cholesky::new(self.sigma.clone())
            .ok_or_else(|| Error::Matrix("matrix is not positive definite".into()))?
            .inverse();
        GaussianModel::new(self.ground.clone(), symmetrize(inv), self.eps)
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn unit_diagonal(m: DMatrix<f64>) -> DMatrix<f64> {
    let d: Vec<f64> = m.diagonal().iter().map(|x| x.sqrt().recip()).collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[i] * d[j])
}

pub fn relation_of(model: &GaussianModel) -> Relation {
    model.relation()
}

pub fn inverse_model(model: &GaussianModel) -> Result<GaussianModel> {
    model.inverse()
}

/// Checks `[Σ⁻¹] = [Σ]^⌉` as exact triple sets.
pub fn check_gaussian_duality(model: &GaussianModel) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("gaussian-duality", Population::Single);
    let (rel, mut notes) = model.relation_with_warnings();
    let (inv_rel, inv_notes) = model.inverse()?.relation_with_warnings();
    notes.extend(inv_notes);
    report.notes = notes;
    let dual = rel.dual();
    report.record(Outcome::check(inv_rel == dual, || {
        let diff = inv_rel
            .difference(&dual)
            .and_then(|x| x.union(&dual.difference(&inv_rel)?))
            .expect("same ground set");
        Witness::new(format!(
            "[inverse] and dual of [model] differ in {} triples",
            diff.len()
        ))
        .with_relation(&diff)
    }));
    Ok(report)
}

pub fn check_gaussian_rule(model: &GaussianModel, rule: Rule) -> Option<Violation> {
    is_closed(&model.relation(), rule)
}

/// Off-diagonal magnitudes for tree and sparse models.
const EDGE_WEIGHT: (f64, f64) = (0.2, 0.6);

/// Symmetric matrix supported on the edges of `g`, with random edge weights
/// of magnitude in `[0.2, 0.6]`, a strictly dominant diagonal and unit
/// diagonal after rescaling. Off-edge entries are exactly zero.
fn edge_supported<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> DMatrix<f64> {
    let p = g.p();
    let mut m = DMatrix::<f64>::zeros(p, p);
    for (u, v) in g.edges() {
        let w = rng.random_range(EDGE_WEIGHT.0..=EDGE_WEIGHT.1);
        let w = if rng.random_bool(0.5) { w } else { -w };
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    for i in 0..p {
        let row: f64 = (0..p).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        m[(i, i)] = 1.0 + row;
    }
    unit_diagonal(m)
}

/// Model whose covariance (bidirected) or concentration (undirected)
/// matrix is supported exactly on the edges of the forest `tree`.
pub fn tree_structured_model(tree: &Graph, mode: Mode, seed: u64) -> Result<GaussianModel> {
    use rand::SeedableRng;
    if !tree.is_forest() {
        return Err(Error::NotAForest);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    graph_supported_model(tree, mode, &mut rng)
}

/// Like [`tree_structured_model`] but for any graph; used to produce sparse
/// non-tree models.
pub fn graph_supported_model<R: Rng + ?Sized>(
    g: &Graph,
    mode: Mode,
    rng: &mut R,
) -> Result<GaussianModel> {
    let m = edge_supported(g, rng);
    let sigma = match mode {
        Mode::Bidirected => m,
        Mode::Undirected => {
            let chol = Cholesky::new(m).ok_or_else(|| Error::Matrix("not SPD".into()))?;
            symmetrize(chol.inverse())
        }
    };
    GaussianModel::new(g.ground().clone(), sigma, DEFAULT_EPS)
}

/// `AᵀA + pI` for standard normal `A`, rescaled to unit diagonal.
pub fn random_spd<R: Rng + ?Sized>(ground: Arc<GroundSet>, rng: &mut R) -> Result<GaussianModel> {
    let p = ground.len();
    let a = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let sigma = a.transpose() * &a + DMatrix::identity(p, p) * p as f64;
    GaussianModel::new(ground, symmetrize(unit_diagonal(sigma)), DEFAULT_EPS)
}

/// Kinds of random model produced by [`random_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelFamily {
    /// Dense `AᵀA + pI`; generically no independences.
    Dense,
    /// Covariance or concentration supported on a random forest.
    Forest(Mode),
    /// Covariance or concentration supported on a random sparse graph.
    Sparse(Mode),
    /// Independent dense blocks over a random partition of the vertices.
    Blocks,
}

/// Random SPD model drawn from a rotating mix of families so that sweeps
/// see models with and without independences.
pub fn random_model<R: Rng + ?Sized>(
    ground: Arc<GroundSet>,
    rng: &mut R,
) -> Result<(ModelFamily, GaussianModel)> {
    let p = ground.len();
    let family = match rng.random_range(0..6) {
        0 => ModelFamily::Dense,
        1 => ModelFamily::Forest(Mode::Undirected),
        2 => ModelFamily::Forest(Mode::Bidirected),
        3 => ModelFamily::Sparse(Mode::Undirected),
        4 => ModelFamily::Sparse(Mode::Bidirected),
        _ => ModelFamily::Blocks,
    };
    let model = match family {
        ModelFamily::Dense => random_spd(ground, rng)?,
        ModelFamily::Forest(mode) => {
            let g = random_forest(ground, rng);
            graph_supported_model(&g, mode, rng)?
        }
        ModelFamily::Sparse(mode) => {
            let mut g = Graph::empty(ground);
            for (u, v) in Graph::pairs(p) {
                if rng.random_bool(0.4) {
                    g.add_edge(u, v)?;
                }
            }
            graph_supported_model(&g, mode, rng)?
        }
        ModelFamily::Blocks => {
            let block: Vec<usize> = (0..p).map(|_| rng.random_range(0..3)).collect();
            let a = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
            let dense = a.transpose() * &a + DMatrix::identity(p, p) * p as f64;
            let masked = DMatrix::from_fn(p, p, |i, j| {
                if block[i] == block[j] {
                    dense[(i, j)]
                } else {
                    0.0
                }
            });
            GaussianModel::new(ground, symmetrize(unit_diagonal(masked)), DEFAULT_EPS)?
        }
    };
    Ok((family, model))
}

/// Each vertex after the first attaches to a uniformly chosen earlier
/// vertex with probability 0.8, over a random vertex order.
pub fn random_forest<R: Rng + ?Sized>(ground: Arc<GroundSet>, rng: &mut R) -> Graph {
    use rand::seq::SliceRandom;
    let p = ground.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut g = Graph::empty(ground);
    for i in 1..p {
        if rng.random_bool(0.8) {
            let j = rng.random_range(0..i);
            g.add_edge(order[i], order[j])
                .expect("distinct in-range vertices");
        }
    }
    g
}
