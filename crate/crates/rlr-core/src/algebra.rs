//! Structure-constant presentations and exhaustive axiom verification.
//!
//! All objects live on a chosen basis over GF(p): a commutative associative
//! algebra `A`, a restricted Lie algebra `L` with bracket and p-map, an
//! `A`-module action on `L`, and an anchor `rho : L -> Der(A)`. Axioms that
//! are multilinear are checked on basis tuples; axioms that are polynomial
//! in a slot (the Hochschild identity, p-map additivity) are enumerated
//! exhaustively over the finite carrier up to an evaluation budget, falling
//! back to basis-and-pairwise-sum probing with a `partial` flag.

use crate::gfp::{add_mod, inv_mod, mul_mod, neg_mod, vec_ops, MatGfp, Prime};
use crate::report::{Budget, CheckReport, ReportSet};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("p-map extension hypothesis fails at basis index {index}: (ad e_{index})^p is not ad of the proposed image")]
    PmapHypothesis { index: usize },
    #[error("value outside the derivation algebra")]
    NotADerivation,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Rank-3 structure-constant tensor: `t[i][j][k]` is the `e_k`-coordinate
/// of the product of `e_i` and `e_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tensor3 {
    pub dim_i: usize,
    pub dim_j: usize,
    pub dim_k: usize,
    data: Vec<u32>,
}

impl Tensor3 {
    pub fn zeros(dim_i: usize, dim_j: usize, dim_k: usize) -> Self {
        Tensor3 {
            dim_i,
            dim_j,
            dim_k,
            data: vec![0; dim_i * dim_j * dim_k],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.data[(i * self.dim_j + j) * self.dim_k + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u32) {
        self.data[(i * self.dim_j + j) * self.dim_k + k] = v;
    }

    pub fn from_triples(dim_i: usize, dim_j: usize, dim_k: usize, triples: &[(usize, usize, usize, u32)]) -> Self {
        let mut t = Self::zeros(dim_i, dim_j, dim_k);
        for &(i, j, k, v) in triples {
            t.set(i, j, k, v);
        }
        t
    }

    /// Bilinear evaluation of the tensor at coordinate vectors.
    pub fn apply(&self, x: &[u32], y: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.dim_k];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = mul_mod(xi, yj, p);
                for (k, o) in out.iter_mut().enumerate() {
                    *o = add_mod(*o, mul_mod(c, self.get(i, j, k), p), p);
                }
            }
        }
        out
    }
}

/// Commutative associative algebra given by structure constants.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraPresentation {
    pub name: String,
    pub p: Prime,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub mult: Tensor3,
}

impl AlgebraPresentation {
    pub fn new(
        name: impl Into<String>,
        p: Prime,
        basis_labels: Vec<String>,
        products: &[(usize, usize, usize, u32)],
    ) -> Self {
        let dim = basis_labels.len();
        AlgebraPresentation {
            name: name.into(),
            p,
            dim,
            basis_labels,
            mult: Tensor3::from_triples(dim, dim, dim, products),
        }
    }

    pub fn product(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.mult.apply(a, b, self.p.get())
    }

    /// Left-multiplication operator `b -> a b` as a matrix.
    pub fn mult_operator(&self, a: &[u32]) -> MatGfp {
        let mut m = MatGfp::zeros(self.dim, self.dim, self.p);
        for j in 0..self.dim {
            let col = self.product(a, &vec_ops::unit(self.dim, j));
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// k-th power of an element, k >= 1.
    pub fn power(&self, a: &[u32], k: u32) -> Vec<u32> {
        assert!(k >= 1);
        let mut acc = a.to_vec();
        for _ in 1..k {
            acc = self.product(&acc, a);
        }
        acc
    }

    /// Verify commutativity and associativity on all basis tuples; reports
    /// the first violating tuple instead of raising.
    pub fn check_commutative_associative(&self) -> ReportSet {
        let mut set = ReportSet::new();
        let p = self.p.get();
        let mut comm = CheckReport::pass("commutativity");
        'comm: for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    if self.mult.get(i, j, k) != self.mult.get(j, i, k) {
                        comm = CheckReport::fail(
                            "commutativity",
                            format!("e{} e{} != e{} e{}", i + 1, j + 1, j + 1, i + 1),
                        );
                        break 'comm;
                    }
                }
            }
        }
        set.push(comm);

        let mut assoc = CheckReport::pass("associativity");
        'assoc: for i in 0..self.dim {
            let ei = vec_ops::unit(self.dim, i);
            for j in 0..self.dim {
                let ej = vec_ops::unit(self.dim, j);
                for k in 0..self.dim {
                    let ek = vec_ops::unit(self.dim, k);
                    let lhs = self.product(&self.product(&ei, &ej), &ek);
                    let rhs = self.product(&ei, &self.product(&ej, &ek));
                    if vec_ops::sub(&lhs, &rhs, p).iter().any(|&v| v != 0) {
                        assoc = CheckReport::fail(
                            "associativity",
                            format!("(e{} e{}) e{} != e{} (e{} e{})", i + 1, j + 1, k + 1, i + 1, j + 1, k + 1),
                        );
                        break 'assoc;
                    }
                }
            }
        }
        set.push(assoc);
        set
    }
}

/// Restricted Lie algebra given by an antisymmetric bracket tensor and the
/// p-map images of the basis vectors. Off-basis p-map values are recovered
/// through the `s_i` addition law.
#[derive(Debug, Clone, Serialize)]
pub struct LiePresentation {
    pub name: String,
    pub p: Prime,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub bracket: Tensor3,
    /// `pmap_on_basis[j]` is the coordinate vector of `e_j^{[p]}`.
    pub pmap_on_basis: Vec<Vec<u32>>,
}

impl LiePresentation {
    pub fn new(
        name: impl Into<String>,
        p: Prime,
        basis_labels: Vec<String>,
        brackets: &[(usize, usize, usize, u32)],
        pmap_on_basis: Vec<Vec<u32>>,
    ) -> Self {
        let dim = basis_labels.len();
        let q = p.get();
        let mut bracket = Tensor3::zeros(dim, dim, dim);
        for &(i, j, k, v) in brackets {
            bracket.set(i, j, k, v % q);
            bracket.set(j, i, k, neg_mod(v % q, q));
        }
        LiePresentation {
            name: name.into(),
            p,
            dim,
            basis_labels,
            bracket,
            pmap_on_basis,
        }
    }

    pub fn bracket_vec(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        self.bracket.apply(x, y, self.p.get())
    }

    /// Matrix of `ad_x : y -> [x, y]`.
    pub fn ad_matrix(&self, x: &[u32]) -> MatGfp {
        let mut m = MatGfp::zeros(self.dim, self.dim, self.p);
        for j in 0..self.dim {
            let col = self.bracket_vec(x, &vec_ops::unit(self.dim, j));
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Jacobson coefficients `s_1(x,y), ..., s_{p-1}(x,y)`: expand
    /// `(ad_{t x + y})^{p-1}(x)` as a polynomial in the formal scalar `t`
    /// with coordinate-vector coefficients, then divide the `t^{i-1}`
    /// coefficient by `i` (invertible mod p).
    pub fn jacobson_si(&self, x: &[u32], y: &[u32]) -> Vec<Vec<u32>> {
        let p = self.p.get();
        let deg = p as usize; // track degrees 0..=p-1
        let mut poly: Vec<Vec<u32>> = vec![vec_ops::zero(self.dim); deg];
        poly[0] = x.to_vec();
        for _ in 0..p - 1 {
            let mut next: Vec<Vec<u32>> = vec![vec_ops::zero(self.dim); deg];
            for d in 0..deg {
                // [y, poly_d] keeps degree d; [x, poly_d] raises it by one.
                let by = self.bracket_vec(y, &poly[d]);
                vec_ops::add_assign(&mut next[d], &by, p);
                if d + 1 < deg {
                    let bx = self.bracket_vec(x, &poly[d]);
                    vec_ops::add_assign(&mut next[d + 1], &bx, p);
                }
            }
            poly = next;
        }
        debug_assert!(vec_ops::is_zero(&poly[deg - 1]), "top coefficient must vanish");
        (1..p)
            .map(|i| {
                let inv = inv_mod(i, p);
                vec_ops::scale(inv, &poly[(i - 1) as usize], p)
            })
            .collect()
    }

    /// Evaluate the p-map at an arbitrary vector using semilinearity and
    /// the `s_i` addition law, recursing along the basis expansion.
    pub fn pmap_eval(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p.get();
        let Some(lead) = x.iter().position(|&c| c != 0) else {
            return vec_ops::zero(self.dim);
        };
        let c = x[lead];
        let mut head = vec_ops::zero(self.dim);
        head[lead] = c;
        let mut rest = x.to_vec();
        rest[lead] = 0;
        // (c e_lead)^{[p]} = c^p e_lead^{[p]}
        let cp = {
            let mut acc = 1u32;
            for _ in 0..p {
                acc = mul_mod(acc, c, p);
            }
            acc
        };
        let mut out = vec_ops::scale(cp, &self.pmap_on_basis[lead], p);
        if vec_ops::is_zero(&rest) {
            return out;
        }
        let tail = self.pmap_eval(&rest);
        vec_ops::add_assign(&mut out, &tail, p);
        for si in self.jacobson_si(&head, &rest) {
            vec_ops::add_assign(&mut out, &si, p);
        }
        out
    }

    /// Extend basis p-map images to the unique p-map, after verifying the
    /// hypothesis `(ad e_j)^p = ad f_j` for every basis index.
    pub fn extend_pmap(
        name: impl Into<String>,
        p: Prime,
        basis_labels: Vec<String>,
        brackets: &[(usize, usize, usize, u32)],
        images: Vec<Vec<u32>>,
    ) -> Result<LiePresentation, AlgebraError> {
        let candidate = LiePresentation::new(name, p, basis_labels, brackets, images);
        for j in 0..candidate.dim {
            let ej = vec_ops::unit(candidate.dim, j);
            let lhs = candidate.ad_matrix(&ej).pow(p.get());
            let rhs = candidate.ad_matrix(&candidate.pmap_on_basis[j]);
            if lhs != rhs {
                return Err(AlgebraError::PmapHypothesis { index: j });
            }
        }
        Ok(candidate)
    }

    /// Verify all defining axioms. Multilinear axioms run on basis tuples;
    /// the p-map laws on general elements are enumerated within the budget.
    pub fn check_restricted_lie(&self, budget: Budget) -> ReportSet {
        let mut set = ReportSet::new();
        let p = self.p.get();

        let mut anti = CheckReport::pass("bracket_antisymmetry");
        'anti: for i in 0..self.dim {
            for k in 0..self.dim {
                if self.bracket.get(i, i, k) != 0 {
                    anti = CheckReport::fail("bracket_antisymmetry", format!("[e{0}, e{0}] != 0", i + 1));
                    break 'anti;
                }
                for j in 0..self.dim {
                    if self.bracket.get(i, j, k) != neg_mod(self.bracket.get(j, i, k), p) {
                        anti = CheckReport::fail(
                            "bracket_antisymmetry",
                            format!("[e{}, e{}] != -[e{}, e{}]", i + 1, j + 1, j + 1, i + 1),
                        );
                        break 'anti;
                    }
                }
            }
        }
        set.push(anti);

        let mut jacobi = CheckReport::pass("jacobi");
        'jac: for i in 0..self.dim {
            let ei = vec_ops::unit(self.dim, i);
            for j in 0..self.dim {
                let ej = vec_ops::unit(self.dim, j);
                for k in 0..self.dim {
                    let ek = vec_ops::unit(self.dim, k);
                    let mut acc = self.bracket_vec(&ei, &self.bracket_vec(&ej, &ek));
                    vec_ops::add_assign(&mut acc, &self.bracket_vec(&ej, &self.bracket_vec(&ek, &ei)), p);
                    vec_ops::add_assign(&mut acc, &self.bracket_vec(&ek, &self.bracket_vec(&ei, &ej)), p);
                    if !vec_ops::is_zero(&acc) {
                        jacobi = CheckReport::fail("jacobi", format!("basis triple ({}, {}, {})", i + 1, j + 1, k + 1));
                        break 'jac;
                    }
                }
            }
        }
        set.push(jacobi);

        let mut adp = CheckReport::pass("ad_pmap_on_basis");
        for j in 0..self.dim {
            let ej = vec_ops::unit(self.dim, j);
            let lhs = self.ad_matrix(&self.pmap_on_basis[j]);
            let rhs = self.ad_matrix(&ej).pow(p);
            if lhs != rhs {
                adp = CheckReport::fail(
                    "ad_pmap_on_basis",
                    format!("ad(e{0}^[p]) != (ad e{0})^p", j + 1),
                );
                break;
            }
        }
        set.push(adp);

        // Closure of the addition law and ad-compatibility on general
        // elements. Both are polynomial in the arguments, so basis checks
        // are insufficient.
        let (pairs, partial) = pair_probe(self.dim, p, budget);
        let mut additivity = CheckReport::pass("pmap_addition_law").with_partial(partial);
        let mut ad_general = CheckReport::pass("ad_pmap_general").with_partial(partial);
        let mut semilinear = CheckReport::pass("pmap_semilinearity").with_partial(partial);
        for (x, y) in &pairs {
            let mut rhs = self.pmap_eval(x);
            vec_ops::add_assign(&mut rhs, &self.pmap_eval(y), p);
            for si in self.jacobson_si(x, y) {
                vec_ops::add_assign(&mut rhs, &si, p);
            }
            let sum = vec_ops::add(x, y, p);
            let lhs = self.pmap_eval(&sum);
            if lhs != rhs && additivity.passed() {
                additivity = CheckReport::fail("pmap_addition_law", format!("x={x:?}, y={y:?}")).with_partial(partial);
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (x, _) in &pairs {
            if !seen.insert(x.clone()) {
                continue;
            }
            let px = self.pmap_eval(x);
            if self.ad_matrix(&px) != self.ad_matrix(x).pow(p) && ad_general.passed() {
                ad_general = CheckReport::fail("ad_pmap_general", format!("x={x:?}")).with_partial(partial);
            }
            for lam in 0..p {
                let lx = vec_ops::scale(lam, x, p);
                let mut lam_p = 1u32;
                for _ in 0..p {
                    lam_p = mul_mod(lam_p, lam, p);
                }
                if self.pmap_eval(&lx) != vec_ops::scale(lam_p, &px, p) && semilinear.passed() {
                    semilinear =
                        CheckReport::fail("pmap_semilinearity", format!("lambda={lam}, x={x:?}")).with_partial(partial);
                }
            }
        }
        set.push(additivity);
        set.push(ad_general);
        set.push(semilinear);
        set
    }
}

/// Pairs (x, y) to probe a biquadratic identity: the full cartesian square
/// when it fits the budget, else basis vectors and pairwise sums.
fn pair_probe(dim: usize, p: u32, budget: Budget) -> (Vec<(Vec<u32>, Vec<u32>)>, bool) {
    let space = (p as u64).saturating_pow(dim as u32);
    let full = space.saturating_mul(space);
    if full <= budget.0 {
        let all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim, p).collect();
        let mut pairs = Vec::with_capacity(all.len() * all.len());
        for x in &all {
            for y in &all {
                pairs.push((x.clone(), y.clone()));
            }
        }
        (pairs, false)
    } else {
        let probes = probe_set(dim, p);
        let mut pairs = Vec::with_capacity(probes.len() * probes.len());
        for x in &probes {
            for y in &probes {
                pairs.push((x.clone(), y.clone()));
            }
        }
        (pairs, true)
    }
}

/// Basis vectors plus pairwise sums (the fallback probe set).
pub(crate) fn probe_set(dim: usize, p: u32) -> Vec<Vec<u32>> {
    let mut probes = vec![vec_ops::zero(dim)];
    for i in 0..dim {
        probes.push(vec_ops::unit(dim, i));
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let mut v = vec_ops::unit(dim, i);
            v[j] = 1;
            probes.push(v.clone());
            if p > 2 {
                v[j] = p - 1;
                probes.push(v);
            }
        }
    }
    probes
}

/// Action of `A` on `L`: `act[a][j][k]` is the `x_k`-coordinate of
/// `e_a . x_j`.
#[derive(Debug, Clone, Serialize)]
pub struct ModuleAction {
    pub act: Tensor3,
}

impl ModuleAction {
    pub fn new(dim_a: usize, dim_l: usize, triples: &[(usize, usize, usize, u32)]) -> Self {
        ModuleAction {
            act: Tensor3::from_triples(dim_a, dim_l, dim_l, triples),
        }
    }

    pub fn apply(&self, a: &[u32], x: &[u32], p: u32) -> Vec<u32> {
        self.act.apply(a, x, p)
    }

    /// Matrix of `x -> a . x` on `L`.
    pub fn operator(&self, a: &[u32], p: Prime) -> MatGfp {
        let dim_l = self.act.dim_j;
        let mut m = MatGfp::zeros(dim_l, dim_l, p);
        for j in 0..dim_l {
            let col = self.apply(a, &vec_ops::unit(dim_l, j), p.get());
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Associativity of the action on basis triples.
    pub fn check_associative(&self, alg: &AlgebraPresentation) -> CheckReport {
        let p = alg.p.get();
        let dim_l = self.act.dim_j;
        for a in 0..alg.dim {
            let ea = vec_ops::unit(alg.dim, a);
            for b in 0..alg.dim {
                let eb = vec_ops::unit(alg.dim, b);
                for j in 0..dim_l {
                    let xj = vec_ops::unit(dim_l, j);
                    let lhs = self.apply(&ea, &self.apply(&eb, &xj, p), p);
                    let rhs = self.apply(&alg.product(&ea, &eb), &xj, p);
                    if lhs != rhs {
                        return CheckReport::fail(
                            "action_associativity",
                            format!("a=e{}, b=e{}, x=x{}", a + 1, b + 1, j + 1),
                        );
                    }
                }
            }
        }
        CheckReport::pass("action_associativity")
    }
}

/// Leibniz test for a candidate derivation matrix on `A`.
pub fn is_derivation(alg: &AlgebraPresentation, d: &MatGfp) -> bool {
    let p = alg.p.get();
    for i in 0..alg.dim {
        let ei = vec_ops::unit(alg.dim, i);
        for j in 0..alg.dim {
            let ej = vec_ops::unit(alg.dim, j);
            let lhs = d.mul_vec(&alg.product(&ei, &ej));
            let mut rhs = alg.product(&d.mul_vec(&ei), &ej);
            vec_ops::add_assign(&mut rhs, &alg.product(&ei, &d.mul_vec(&ej)), p);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// p-th matrix power of a derivation; by the binomial expansion in
/// characteristic p this is again a derivation.
pub fn pth_power_derivation(alg: &AlgebraPresentation, d: &MatGfp) -> MatGfp {
    d.pow(alg.p.get())
}

/// The derivation algebra of `A` with a fixed canonical basis, its Lie
/// structure (commutator bracket, p-th power map) and coordinate maps.
#[derive(Debug, Clone)]
pub struct DerSpace {
    pub alg_dim: usize,
    pub p: Prime,
    /// Canonical reduced-echelon basis of flattened derivation matrices.
    pub flat: crate::gfp::Subspace,
    pub mats: Vec<MatGfp>,
}

impl DerSpace {
    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    /// Coordinates of a derivation matrix in the canonical basis, or None
    /// if the matrix is not in the span.
    pub fn coords(&self, m: &MatGfp) -> Option<Vec<u32>> {
        let p = self.p.get();
        let mut v = m.flatten();
        let mut coefs = vec![0u32; self.dim()];
        for (r, b) in self.flat.basis().iter().enumerate() {
            let lead = b.iter().position(|&x| x != 0).expect("echelon row");
            let c = v[lead];
            if c != 0 {
                coefs[r] = c;
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = add_mod(*vi, mul_mod(neg_mod(c, p), bi, p), p);
                }
            }
        }
        if vec_ops::is_zero(&v) {
            Some(coefs)
        } else {
            None
        }
    }

    /// Derivation matrix with the given coordinates.
    pub fn matrix(&self, coords: &[u32]) -> MatGfp {
        let p = self.p.get();
        let mut acc = MatGfp::zeros(self.alg_dim, self.alg_dim, self.p);
        for (c, m) in coords.iter().zip(&self.mats) {
            if *c != 0 {
                acc = acc.add(&m.scale(*c));
            }
        }
        let _ = p;
        acc
    }

    /// `Der(A)` as a restricted Lie algebra: commutator bracket, p-th power
    /// map, expressed in the canonical basis.
    pub fn lie_presentation(&self) -> Result<LiePresentation, AlgebraError> {
        let n = self.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = self.mats[i].commutator(&self.mats[j]);
                let coords = self.coords(&c).ok_or(AlgebraError::NotADerivation)?;
                for (k, &v) in coords.iter().enumerate() {
                    if v != 0 {
                        brackets.push((i, j, k, v));
                    }
                }
            }
        }
        let mut pmap = Vec::new();
        for m in &self.mats {
            let mp = m.pow(self.p.get());
            pmap.push(self.coords(&mp).ok_or(AlgebraError::NotADerivation)?);
        }
        Ok(LiePresentation::new(
            "Der",
            self.p,
            (0..n).map(|i| format!("D{}", i + 1)).collect(),
            &brackets,
            pmap,
        ))
    }
}

/// Solve the Leibniz system for `A` and return the canonical basis of the
/// derivation space. Unknowns are the matrix entries `D[i][j]` flattened
/// row-major.
pub fn compute_derivations(alg: &AlgebraPresentation) -> DerSpace {
    let n = alg.dim;
    let p = alg.p;
    let q = p.get();
    let unknowns = n * n;
    let mut rows = Vec::new();
    for j in 0..n {
        for k in 0..n {
            for m in 0..n {
                // coordinate m of D(e_j e_k) - D(e_j) e_k - e_j D(e_k)
                let mut row = vec![0u32; unknowns];
                for l in 0..n {
                    // D(e_l) contributes via c[j][k][l]
                    let c = alg.mult.get(j, k, l);
                    if c != 0 {
                        row[m * n + l] = add_mod(row[m * n + l], c, q);
                    }
                }
                for i in 0..n {
                    // -(D[i][j] e_i) e_k
                    let c = alg.mult.get(i, k, m);
                    if c != 0 {
                        row[i * n + j] = add_mod(row[i * n + j], neg_mod(c, q), q);
                    }
                    // -e_j (D[i][k] e_i)
                    let c = alg.mult.get(j, i, m);
                    if c != 0 {
                        row[i * n + k] = add_mod(row[i * n + k], neg_mod(c, q), q);
                    }
                }
                rows.push(row);
            }
        }
    }
    let m = MatGfp::from_rows(rows, unknowns, p);
    let kernel = m.kernel_basis();
    let mats = kernel
        .basis()
        .iter()
        .map(|v| MatGfp::from_flat(n, n, p, v.clone()))
        .collect();
    DerSpace {
        alg_dim: n,
        p,
        flat: kernel,
        mats,
    }
}

/// The full bundle `(A, L, action, anchor)`.
#[derive(Debug, Clone)]
pub struct RlrAlgebra {
    pub name: String,
    pub a: AlgebraPresentation,
    pub l: LiePresentation,
    pub action: ModuleAction,
    /// `anchor[j]` is the matrix of `rho(x_j)` acting on `A`.
    pub anchor: Vec<MatGfp>,
}

impl RlrAlgebra {
    pub fn p(&self) -> Prime {
        self.a.p
    }

    /// `rho(x)` for an arbitrary coordinate vector.
    pub fn rho(&self, x: &[u32]) -> MatGfp {
        let mut acc = MatGfp::zeros(self.a.dim, self.a.dim, self.p());
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.anchor[j].scale(c));
            }
        }
        acc
    }

    /// Scalar action of `a` on a derivation: `(a D)(b) = a . D(b)`.
    pub fn a_times_derivation(&self, a: &[u32], d: &MatGfp) -> MatGfp {
        self.a.mult_operator(a).matmul(d)
    }

    /// Aggregate verification of every defining axiom; each invariant is
    /// reported independently.
    pub fn check_rlr(&self, budget: Budget) -> ReportSet {
        let p = self.p().get();
        let dim_a = self.a.dim;
        let dim_l = self.l.dim;
        let mut set = ReportSet::new();

        for c in self.a.check_commutative_associative().checks {
            set.push(c);
        }
        for c in self.l.check_restricted_lie(budget).checks {
            set.push(c);
        }
        set.push(self.action.check_associative(&self.a));

        let der = compute_derivations(&self.a);
        let mut in_der = CheckReport::pass("anchor_into_derivations");
        for (j, m) in self.anchor.iter().enumerate() {
            if !is_derivation(&self.a, m) || der.coords(m).is_none() {
                in_der = CheckReport::fail("anchor_into_derivations", format!("rho(x{}) not a derivation", j + 1));
                break;
            }
        }
        set.push(in_der);

        let mut lie_morph = CheckReport::pass("anchor_lie_morphism");
        'lm: for i in 0..dim_l {
            let xi = vec_ops::unit(dim_l, i);
            for j in 0..dim_l {
                let xj = vec_ops::unit(dim_l, j);
                let lhs = self.rho(&self.l.bracket_vec(&xi, &xj));
                let rhs = self.rho(&xi).commutator(&self.rho(&xj));
                if lhs != rhs {
                    lie_morph = CheckReport::fail("anchor_lie_morphism", format!("basis pair ({}, {})", i + 1, j + 1));
                    break 'lm;
                }
            }
        }
        set.push(lie_morph);

        let mut restricted = CheckReport::pass("anchor_restricted_morphism");
        for j in 0..dim_l {
            let xj = vec_ops::unit(dim_l, j);
            let lhs = self.rho(&self.l.pmap_eval(&xj));
            let rhs = self.rho(&xj).pow(p);
            if lhs != rhs {
                restricted = CheckReport::fail("anchor_restricted_morphism", format!("basis vector x{}", j + 1));
                break;
            }
        }
        set.push(restricted);

        let mut a_linear = CheckReport::pass("anchor_a_linear");
        'al: for a in 0..dim_a {
            let ea = vec_ops::unit(dim_a, a);
            for j in 0..dim_l {
                let xj = vec_ops::unit(dim_l, j);
                let lhs = self.rho(&self.action.apply(&ea, &xj, p));
                let rhs = self.a_times_derivation(&ea, &self.rho(&xj));
                if lhs != rhs {
                    a_linear = CheckReport::fail("anchor_a_linear", format!("a=e{}, x=x{}", a + 1, j + 1));
                    break 'al;
                }
            }
        }
        set.push(a_linear);

        let mut leibniz = CheckReport::pass("leibniz_compatibility");
        'lb: for i in 0..dim_l {
            let x = vec_ops::unit(dim_l, i);
            for a in 0..dim_a {
                let ea = vec_ops::unit(dim_a, a);
                for j in 0..dim_l {
                    let y = vec_ops::unit(dim_l, j);
                    let lhs = self.l.bracket_vec(&x, &self.action.apply(&ea, &y, p));
                    let mut rhs = self.action.apply(&ea, &self.l.bracket_vec(&x, &y), p);
                    let rx_a = self.rho(&x).mul_vec(&ea);
                    vec_ops::add_assign(&mut rhs, &self.action.apply(&rx_a, &y, p), p);
                    if lhs != rhs {
                        leibniz = CheckReport::fail(
                            "leibniz_compatibility",
                            format!("x=x{}, a=e{}, y=x{}", i + 1, a + 1, j + 1),
                        );
                        break 'lb;
                    }
                }
            }
        }
        set.push(leibniz);

        // Hochschild identity: not multilinear in a, so enumerate A x L.
        let space = (p as u64).pow(dim_a as u32) * (p as u64).pow(dim_l as u32);
        let partial = space > budget.0;
        let a_elems: Vec<Vec<u32>> = if partial {
            probe_set(dim_a, p)
        } else {
            vec_ops::enumerate_all(dim_a, p).collect()
        };
        let l_elems: Vec<Vec<u32>> = if partial {
            probe_set(dim_l, p)
        } else {
            vec_ops::enumerate_all(dim_l, p).collect()
        };
        let mut hoch = CheckReport::pass("hochschild_identity").with_partial(partial);
        'hoch: for a in &a_elems {
            for x in &l_elems {
                let ax = self.action.apply(a, x, p);
                let lhs = self.l.pmap_eval(&ax);
                let ap = self.a.power(a, p);
                let mut rhs = self.action.apply(&ap, &self.l.pmap_eval(x), p);
                let rho_ax_pm1_a = self.rho(&ax).pow(p - 1).mul_vec(a);
                vec_ops::add_assign(&mut rhs, &self.action.apply(&rho_ax_pm1_a, x, p), p);
                if lhs != rhs {
                    hoch = CheckReport::fail("hochschild_identity", format!("a={a:?}, x={x:?}")).with_partial(partial);
                    break 'hoch;
                }
            }
        }
        set.push(hoch);
        set
    }
}

/// An `L`-module on a chosen basis: `act[j]` is the operator of `x_j`.
#[derive(Debug, Clone)]
pub struct LieModule {
    pub dim: usize,
    pub act: Vec<MatGfp>,
}

impl LieModule {
    pub fn adjoint(l: &LiePresentation) -> Self {
        LieModule {
            dim: l.dim,
            act: (0..l.dim)
                .map(|j| l.ad_matrix(&vec_ops::unit(l.dim, j)))
                .collect(),
        }
    }

    pub fn operator(&self, x: &[u32], p: Prime) -> MatGfp {
        let mut acc = MatGfp::zeros(self.dim, self.dim, p);
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.act[j].scale(c));
            }
        }
        acc
    }
}

/// Restricted module axioms: bracket compatibility on basis pairs and the
/// p-fold action law on general elements (enumerated within the budget).
pub fn check_restricted_module(l: &LiePresentation, m: &LieModule, budget: Budget) -> ReportSet {
    let p = l.p.get();
    let mut set = ReportSet::new();

    let mut bracket_compat = CheckReport::pass("module_bracket_compatibility");
    'bc: for i in 0..l.dim {
        let xi = vec_ops::unit(l.dim, i);
        for j in 0..l.dim {
            let xj = vec_ops::unit(l.dim, j);
            let lhs = m.operator(&l.bracket_vec(&xi, &xj), l.p);
            let rhs = m.operator(&xi, l.p).commutator(&m.operator(&xj, l.p));
            if lhs != rhs {
                bracket_compat =
                    CheckReport::fail("module_bracket_compatibility", format!("basis pair ({}, {})", i + 1, j + 1));
                break 'bc;
            }
        }
    }
    set.push(bracket_compat);

    let space = (p as u64).pow(l.dim as u32);
    let partial = space > budget.0;
    let elems: Vec<Vec<u32>> = if partial {
        probe_set(l.dim, p)
    } else {
        vec_ops::enumerate_all(l.dim, p).collect()
    };
    let mut restricted = CheckReport::pass("module_p_fold_action").with_partial(partial);
    for x in &elems {
        let lhs = m.operator(x, l.p).pow(p);
        let rhs = m.operator(&l.pmap_eval(x), l.p);
        if lhs != rhs {
            restricted = CheckReport::fail("module_p_fold_action", format!("x={x:?}")).with_partial(partial);
            break;
        }
    }
    set.push(restricted);
    set
}

/// Restricted derivation axioms for a linear map `d : L -> L`.
pub fn check_restricted_derivation(l: &LiePresentation, d: &MatGfp, budget: Budget) -> ReportSet {
    let p = l.p.get();
    let mut set = ReportSet::new();

    let mut leibniz = CheckReport::pass("derivation_leibniz");
    'lb: for i in 0..l.dim {
        let xi = vec_ops::unit(l.dim, i);
        for j in 0..l.dim {
            let xj = vec_ops::unit(l.dim, j);
            let lhs = d.mul_vec(&l.bracket_vec(&xi, &xj));
            let mut rhs = l.bracket_vec(&d.mul_vec(&xi), &xj);
            vec_ops::add_assign(&mut rhs, &l.bracket_vec(&xi, &d.mul_vec(&xj)), p);
            if lhs != rhs {
                leibniz = CheckReport::fail("derivation_leibniz", format!("basis pair ({}, {})", i + 1, j + 1));
                break 'lb;
            }
        }
    }
    set.push(leibniz);

    let space = (p as u64).pow(l.dim as u32);
    let partial = space > budget.0;
    let elems: Vec<Vec<u32>> = if partial {
        probe_set(l.dim, p)
    } else {
        vec_ops::enumerate_all(l.dim, p).collect()
    };
    let mut restr = CheckReport::pass("derivation_pmap_compatibility").with_partial(partial);
    for x in &elems {
        let lhs = d.mul_vec(&l.pmap_eval(x));
        let rhs = l.ad_matrix(x).pow(p - 1).mul_vec(&d.mul_vec(x));
        if lhs != rhs {
            restr = CheckReport::fail("derivation_pmap_compatibility", format!("x={x:?}")).with_partial(partial);
            break;
        }
    }
    set.push(restr);
    set
}

/// A representation of the bundle: an `A`-module `M` with compatible
/// operators `pi(x)`.
#[derive(Debug, Clone)]
pub struct LrRepresentation {
    pub dim: usize,
    /// `a_act[i]`: operator of the `A`-basis vector `e_i` on `M`.
    pub a_act: Vec<MatGfp>,
    /// `pi[j]`: operator of the `L`-basis vector `x_j` on `M`.
    pub pi: Vec<MatGfp>,
}

impl LrRepresentation {
    pub fn a_operator(&self, a: &[u32], p: Prime) -> MatGfp {
        let mut acc = MatGfp::zeros(self.dim, self.dim, p);
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.a_act[i].scale(c));
            }
        }
        acc
    }

    pub fn pi_operator(&self, x: &[u32], p: Prime) -> MatGfp {
        let mut acc = MatGfp::zeros(self.dim, self.dim, p);
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.pi[j].scale(c));
            }
        }
        acc
    }
}

/// Representation axioms plus the p-th power identity
/// `pi(ax)^p = a^p pi(x)^p + rho(ax)^{p-1}(a) pi(x)` as a consistency
/// cross-check, enumerated over A x L. The source display writes the final
/// factor as `pi_x`; it is read as `pi(x)` and the report says so.
pub fn check_lr_representation(r: &RlrAlgebra, m: &LrRepresentation, budget: Budget) -> ReportSet {
    let p = r.p().get();
    let mut set = ReportSet::new();

    let mut lie_morph = CheckReport::pass("representation_lie_morphism");
    'lm: for i in 0..r.l.dim {
        let xi = vec_ops::unit(r.l.dim, i);
        for j in 0..r.l.dim {
            let xj = vec_ops::unit(r.l.dim, j);
            let lhs = m.pi_operator(&r.l.bracket_vec(&xi, &xj), r.p());
            let rhs = m.pi_operator(&xi, r.p()).commutator(&m.pi_operator(&xj, r.p()));
            if lhs != rhs {
                lie_morph =
                    CheckReport::fail("representation_lie_morphism", format!("basis pair ({}, {})", i + 1, j + 1));
                break 'lm;
            }
        }
    }
    set.push(lie_morph);

    let mut a_linear = CheckReport::pass("representation_a_linear");
    'al: for a in 0..r.a.dim {
        let ea = vec_ops::unit(r.a.dim, a);
        for j in 0..r.l.dim {
            let xj = vec_ops::unit(r.l.dim, j);
            let lhs = m.pi_operator(&r.action.apply(&ea, &xj, p), r.p());
            let rhs = m.a_operator(&ea, r.p()).matmul(&m.pi[j]);
            if lhs != rhs {
                a_linear = CheckReport::fail("representation_a_linear", format!("a=e{}, x=x{}", a + 1, j + 1));
                break 'al;
            }
        }
    }
    set.push(a_linear);

    let mut law = CheckReport::pass("representation_leibniz_law");
    'law: for j in 0..r.l.dim {
        let xj = vec_ops::unit(r.l.dim, j);
        for a in 0..r.a.dim {
            let ea = vec_ops::unit(r.a.dim, a);
            for mm in 0..m.dim {
                let em = vec_ops::unit(m.dim, mm);
                let lhs = m.pi[j].mul_vec(&m.a_operator(&ea, r.p()).mul_vec(&em));
                let mut rhs = m.a_operator(&ea, r.p()).mul_vec(&m.pi[j].mul_vec(&em));
                let rho_x_a = r.rho(&xj).mul_vec(&ea);
                vec_ops::add_assign(&mut rhs, &m.a_operator(&rho_x_a, r.p()).mul_vec(&em), p);
                if lhs != rhs {
                    law = CheckReport::fail(
                        "representation_leibniz_law",
                        format!("x=x{}, a=e{}, m=m{}", j + 1, a + 1, mm + 1),
                    );
                    break 'law;
                }
            }
        }
    }
    set.push(law);

    let space = (p as u64).pow(r.a.dim as u32) * (p as u64).pow(r.l.dim as u32);
    let partial = space > budget.0;
    let a_elems: Vec<Vec<u32>> = if partial {
        probe_set(r.a.dim, p)
    } else {
        vec_ops::enumerate_all(r.a.dim, p).collect()
    };
    let l_elems: Vec<Vec<u32>> = if partial {
        probe_set(r.l.dim, p)
    } else {
        vec_ops::enumerate_all(r.l.dim, p).collect()
    };
    let mut pth = CheckReport::pass("representation_pth_power_identity")
        .with_partial(partial)
        .with_note("final factor read as pi(x), not a separate symbol pi_x");
    'pth: for a in &a_elems {
        for x in &l_elems {
            let ax = r.action.apply(a, x, p);
            let lhs = m.pi_operator(&ax, r.p()).pow(p);
            let ap = r.a.power(a, p);
            let mut rhs = m.a_operator(&ap, r.p()).matmul(&m.pi_operator(x, r.p()).pow(p));
            let rho_ax_pm1_a = r.rho(&ax).pow(p - 1).mul_vec(a);
            rhs = rhs.add(&m.a_operator(&rho_ax_pm1_a, r.p()).matmul(&m.pi_operator(x, r.p())));
            if lhs != rhs {
                pth = CheckReport::fail("representation_pth_power_identity", format!("a={a:?}, x={x:?}"))
                    .with_partial(partial)
                    .with_note("final factor read as pi(x), not a separate symbol pi_x");
                break 'pth;
            }
        }
    }
    set.push(pth);
    set
}
