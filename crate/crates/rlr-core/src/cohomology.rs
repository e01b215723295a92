//! Coordinate charts, constraint systems and the cohomology solvers.
//!
//! Characteristic 2: the degree-n Lie-Rinehart cochains form a literal
//! GF(2) coordinate space once the tables are flattened; the compatibility
//! constraints and the differentials are linear maps on that chart. `Z^2`
//! is the intersection of the differential kernel with the constraint
//! kernel, `B^2` is the image of the degree-1 cochain space under the
//! differential, and both are kept as canonical reduced-echelon subspaces.
//!
//! Characteristic p >= 3: no chart is built. Deformation 2-cocycles are
//! verified pointwise over the finite carrier, exactly as defined, with
//! the induced maps that live in an external reference marked as not
//! evaluated.

use crate::algebra::{LiePresentation, RlrAlgebra};
use crate::cochain::{
    combos, d_ce, lr_embed, tuples, AltForm, CochainError, ComplexCtx, Complexes, LrCochain,
    OmegaTable, ResPair, Third,
};
use crate::gfp::{mul_mod, vec_ops, MatGfp, Subspace};
use crate::report::{Budget, CheckReport, ReportSet};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("enumeration budget exceeded: {0} evaluations requested")]
    BudgetExceeded(u64),
    #[error("characteristic {0} not supported by this solver")]
    WrongCharacteristic(u32),
    #[error("candidate violates its cochain constraint: {0}")]
    Candidate(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}

/// Ordered coordinate blocks of the degree-n Lie-Rinehart cochain space.
#[derive(Debug, Clone, Serialize)]
pub struct LrChart {
    pub n: usize,
    pub dim_l: usize,
    pub dim_der: usize,
    /// `(block name, length)` in storage order.
    pub blocks: Vec<(String, usize)>,
}

impl LrChart {
    pub fn new(cx: &Complexes, n: usize) -> Self {
        let dim_l = cx.dim_l();
        let dim_der = cx.dim_der();
        let blocks = match n {
            1 => vec![
                ("mu".to_string(), dim_l * dim_l),
                ("d".to_string(), dim_der),
            ],
            2 => vec![
                ("mu".to_string(), combos(dim_l, 2).len() * dim_l),
                ("omega".to_string(), dim_l * dim_l),
                ("theta".to_string(), dim_l * dim_der),
            ],
            _ => vec![
                ("mu".to_string(), combos(dim_l, n).len() * dim_l),
                (
                    "omega".to_string(),
                    dim_l * combos(dim_l, n - 2).len() * dim_l,
                ),
                ("theta".to_string(), combos(dim_l, n - 1).len() * dim_der),
                (
                    "gamma".to_string(),
                    dim_l * combos(dim_l, n - 3).len() * dim_der,
                ),
            ],
        };
        LrChart {
            n,
            dim_l,
            dim_der,
            blocks,
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|(_, l)| l).sum()
    }

    pub fn to_vec(&self, c: &LrCochain) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.dim());
        match c {
            LrCochain::D1 { mu, d } => {
                for row in &mu.table {
                    out.extend_from_slice(row);
                }
                out.extend_from_slice(d);
            }
            LrCochain::D2 { mu, omega, theta } => {
                for row in &mu.table {
                    out.extend_from_slice(row);
                }
                for zrow in &omega.table {
                    for v in zrow {
                        out.extend_from_slice(v);
                    }
                }
                for row in &theta.table {
                    out.extend_from_slice(row);
                }
            }
            LrCochain::Dn {
                mu,
                omega,
                theta,
                gamma,
            } => {
                for row in &mu.table {
                    out.extend_from_slice(row);
                }
                for zrow in &omega.table {
                    for v in zrow {
                        out.extend_from_slice(v);
                    }
                }
                for row in &theta.table {
                    out.extend_from_slice(row);
                }
                for zrow in &gamma.table {
                    for v in zrow {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), self.dim());
        out
    }

    pub fn from_vec(&self, v: &[u32]) -> LrCochain {
        assert_eq!(v.len(), self.dim(), "chart dimension");
        let dl = self.dim_l;
        let dd = self.dim_der;
        let mut pos = 0usize;
        let mut take = |len: usize| {
            let s = v[pos..pos + len].to_vec();
            pos += len;
            s
        };
        let fill_alt = |k: usize, val_dim: usize, data: Vec<u32>| {
            let mut f = AltForm::zero(k, dl, val_dim);
            for (r, chunk) in data.chunks(val_dim).enumerate() {
                f.table[r] = chunk.to_vec();
            }
            f
        };
        let fill_omega = |n: usize, val_dim: usize, data: Vec<u32>| {
            let mut o = OmegaTable::zero(n, dl, val_dim);
            let zlen = combos(dl, n - 2).len();
            for (idx, chunk) in data.chunks(val_dim).enumerate() {
                o.table[idx / zlen][idx % zlen] = chunk.to_vec();
            }
            o
        };
        match self.n {
            1 => {
                let mu = fill_alt(1, dl, take(dl * dl));
                let d = take(dd);
                LrCochain::D1 { mu, d }
            }
            2 => {
                let mu = fill_alt(2, dl, take(combos(dl, 2).len() * dl));
                let omega = fill_omega(2, dl, take(dl * dl));
                let theta = fill_alt(1, dd, take(dl * dd));
                LrCochain::D2 { mu, omega, theta }
            }
            n => {
                let mu = fill_alt(n, dl, take(combos(dl, n).len() * dl));
                let omega = fill_omega(n, dl, take(dl * combos(dl, n - 2).len() * dl));
                let theta = fill_alt(n - 1, dd, take(combos(dl, n - 1).len() * dd));
                let gamma = fill_omega(n - 1, dd, take(dl * combos(dl, n - 3).len() * dd));
                LrCochain::Dn {
                    mu,
                    omega,
                    theta,
                    gamma,
                }
            }
        }
    }
}

/// Residuals of every Lie-Rinehart compatibility constraint instance, in a
/// fixed deterministic order. A cochain satisfies the constraints exactly
/// when this vector vanishes; the instance sets are the same ones
/// `validate_lr` walks (the unit tests cross-check the two).
pub fn lr_constraint_residuals(cx: &Complexes, c: &LrCochain) -> Vec<u32> {
    let p = cx.p();
    let dim_a = cx.r.a.dim;
    let dim_l = cx.dim_l();
    let a_all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim_a, p).collect();
    let l_all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim_l, p).collect();
    let mut out = Vec::new();

    match c {
        LrCochain::D1 { mu, d } => {
            let dmat = cx.der.matrix(d);
            for ai in 0..dim_a {
                let ea = vec_ops::unit(dim_a, ai);
                for xi in 0..dim_l {
                    let x = vec_ops::unit(dim_l, xi);
                    let ax = cx.r.action.apply(&ea, &x, p);
                    let lhs = mu.eval(&[&ax], p);
                    let mut rhs = cx.r.action.apply(&ea, &mu.eval(&[&x], p), p);
                    vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&dmat.mul_vec(&ea), &x, p), p);
                    out.extend(vec_ops::sub(&lhs, &rhs, p));
                }
            }
        }
        LrCochain::D2 { mu, omega, theta } => {
            for xi in 0..dim_l {
                let x = vec_ops::unit(dim_l, xi);
                for ai in 0..dim_a {
                    let ea = vec_ops::unit(dim_a, ai);
                    for yi in 0..dim_l {
                        let y = vec_ops::unit(dim_l, yi);
                        let ay = cx.r.action.apply(&ea, &y, p);
                        let lhs = mu.eval(&[&x, &ay], p);
                        let mut rhs = cx.r.action.apply(&ea, &mu.eval(&[&x, &y], p), p);
                        let th = cx.der.matrix(&theta.eval(&[&x], p));
                        vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&th.mul_vec(&ea), &y, p), p);
                        out.extend(vec_ops::sub(&lhs, &rhs, p));
                    }
                }
            }
            let pair = ResPair::pair(mu.clone(), omega.clone());
            for a in &a_all {
                for x in &l_all {
                    let ax = cx.r.action.apply(a, x, p);
                    let lhs = pair.eval_omega(&ax, &[], p).expect("arity");
                    let a2 = cx.r.a.product(a, a);
                    let mut rhs = cx.r.action.apply(&a2, &pair.eval_omega(x, &[], p).expect("arity"), p);
                    let th = cx.der.matrix(&theta.eval(&[&ax], p));
                    vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&th.mul_vec(a), x, p), p);
                    out.extend(vec_ops::sub(&lhs, &rhs, p));
                }
            }
            out.extend(alt_a_linearity_residuals(cx, theta));
        }
        LrCochain::Dn {
            mu,
            omega,
            theta,
            gamma,
        } => {
            let n = mu.k;
            for tuple in tuples(dim_l, n) {
                let units: Vec<Vec<u32>> = tuple.iter().map(|&i| vec_ops::unit(dim_l, i)).collect();
                for ai in 0..dim_a {
                    let ea = vec_ops::unit(dim_a, ai);
                    let axn = cx.r.action.apply(&ea, &units[n - 1], p);
                    let mut args: Vec<&[u32]> = units.iter().take(n - 1).map(|u| u.as_slice()).collect();
                    args.push(&axn);
                    let lhs = mu.eval(&args, p);
                    let plain: Vec<&[u32]> = units.iter().map(|u| u.as_slice()).collect();
                    let mut rhs = cx.r.action.apply(&ea, &mu.eval(&plain, p), p);
                    let th_args: Vec<&[u32]> = units.iter().take(n - 1).map(|u| u.as_slice()).collect();
                    let th = cx.der.matrix(&theta.eval(&th_args, p));
                    vec_ops::add_assign(
                        &mut rhs,
                        &cx.r.action.apply(&th.mul_vec(&ea), &units[n - 1], p),
                        p,
                    );
                    out.extend(vec_ops::sub(&lhs, &rhs, p));
                }
            }
            let pair = ResPair::pair(mu.clone(), omega.clone());
            let tg = ResPair::pair(theta.clone(), gamma.clone());
            let zlist = combos(dim_l, n - 2);
            for a in &a_all {
                for x in &l_all {
                    for zc in &zlist {
                        let zunits: Vec<Vec<u32>> = zc.iter().map(|&z| vec_ops::unit(dim_l, z)).collect();
                        let zargs: Vec<&[u32]> = zunits.iter().map(|z| z.as_slice()).collect();
                        let ax = cx.r.action.apply(a, x, p);
                        let lhs = pair.eval_omega(&ax, &zargs, p).expect("arity");
                        let a2 = cx.r.a.product(a, a);
                        let mut rhs =
                            cx.r.action.apply(&a2, &pair.eval_omega(x, &zargs, p).expect("arity"), p);
                        let mut th_args: Vec<&[u32]> = vec![ax.as_slice()];
                        th_args.extend(zargs.iter());
                        let th = cx.der.matrix(&theta.eval(&th_args, p));
                        vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&th.mul_vec(a), x, p), p);
                        out.extend(vec_ops::sub(&lhs, &rhs, p));
                    }
                }
            }
            for xi in 0..dim_l {
                let x = vec_ops::unit(dim_l, xi);
                for ztuple in tuples(dim_l, n - 2) {
                    for slot in 0..n - 2 {
                        for ai in 0..dim_a {
                            let ea = vec_ops::unit(dim_a, ai);
                            let zunits: Vec<Vec<u32>> =
                                ztuple.iter().map(|&z| vec_ops::unit(dim_l, z)).collect();
                            let mut scaled = zunits.clone();
                            scaled[slot] = cx.r.action.apply(&ea, &zunits[slot], p);
                            let sargs: Vec<&[u32]> = scaled.iter().map(|z| z.as_slice()).collect();
                            let lhs = pair.eval_omega(&x, &sargs, p).expect("arity");
                            let zargs: Vec<&[u32]> = zunits.iter().map(|z| z.as_slice()).collect();
                            let mut rhs =
                                cx.r.action.apply(&ea, &pair.eval_omega(&x, &zargs, p).expect("arity"), p);
                            let rest: Vec<&[u32]> = zunits
                                .iter()
                                .enumerate()
                                .filter(|&(s, _)| s != slot)
                                .map(|(_, z)| z.as_slice())
                                .collect();
                            let g = cx.der.matrix(&tg.eval_omega(&x, &rest, p).expect("arity"));
                            vec_ops::add_assign(
                                &mut rhs,
                                &cx.r.action.apply(&g.mul_vec(&ea), &zunits[slot], p),
                                p,
                            );
                            out.extend(vec_ops::sub(&lhs, &rhs, p));
                        }
                    }
                }
            }
            out.extend(alt_a_linearity_residuals(cx, theta));
            let wlist = combos(dim_l, n.saturating_sub(3));
            for a in &a_all {
                for x in &l_all {
                    for wc in &wlist {
                        let wunits: Vec<Vec<u32>> = wc.iter().map(|&w| vec_ops::unit(dim_l, w)).collect();
                        let wargs: Vec<&[u32]> = wunits.iter().map(|w| w.as_slice()).collect();
                        let ax = cx.r.action.apply(a, x, p);
                        let lhs = cx.der.matrix(&tg.eval_omega(&ax, &wargs, p).expect("arity"));
                        let a2 = cx.r.a.product(a, a);
                        let rhs = cx
                            .r
                            .a
                            .mult_operator(&a2)
                            .matmul(&cx.der.matrix(&tg.eval_omega(x, &wargs, p).expect("arity")));
                        out.extend(lhs.sub(&rhs).flatten());
                        for slot in 0..wargs.len() {
                            let mut scaled = wunits.clone();
                            scaled[slot] = cx.r.action.apply(a, &wunits[slot], p);
                            let sargs: Vec<&[u32]> = scaled.iter().map(|w| w.as_slice()).collect();
                            let lhs = cx.der.matrix(&tg.eval_omega(x, &sargs, p).expect("arity"));
                            let rhs = cx
                                .r
                                .a
                                .mult_operator(a)
                                .matmul(&cx.der.matrix(&tg.eval_omega(x, &wargs, p).expect("arity")));
                            out.extend(lhs.sub(&rhs).flatten());
                        }
                    }
                }
            }
        }
    }
    out
}

fn alt_a_linearity_residuals(cx: &Complexes, theta: &AltForm) -> Vec<u32> {
    let p = cx.p();
    let dim_a = cx.r.a.dim;
    let dim_l = cx.dim_l();
    let mut out = Vec::new();
    for tuple in tuples(dim_l, theta.k) {
        let units: Vec<Vec<u32>> = tuple.iter().map(|&i| vec_ops::unit(dim_l, i)).collect();
        for slot in 0..theta.k {
            for ai in 0..dim_a {
                let ea = vec_ops::unit(dim_a, ai);
                let mut scaled = units.clone();
                scaled[slot] = cx.r.action.apply(&ea, &units[slot], p);
                let sargs: Vec<&[u32]> = scaled.iter().map(|u| u.as_slice()).collect();
                let lhs = cx.der.matrix(&theta.eval(&sargs, p));
                let plain: Vec<&[u32]> = units.iter().map(|u| u.as_slice()).collect();
                let rhs = cx
                    .r
                    .a
                    .mult_operator(&ea)
                    .matmul(&cx.der.matrix(&theta.eval(&plain, p)));
                out.extend(lhs.sub(&rhs).flatten());
            }
        }
    }
    out
}

/// The constraint system of the degree-n chart: rows are constraint
/// instances, the kernel is the coordinate space of valid degree-n
/// Lie-Rinehart cochains.
pub fn constraint_system(cx: &Complexes, n: usize, budget: Budget) -> Result<MatGfp, CohomologyError> {
    let p = cx.p();
    let cost = (p as u64).pow(cx.r.a.dim as u32) * (p as u64).pow(cx.dim_l() as u32);
    if cost > budget.0 {
        return Err(CohomologyError::BudgetExceeded(cost));
    }
    let chart = LrChart::new(cx, n);
    let dim = chart.dim();
    let mut cols = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut v = vec![0u32; dim];
        v[k] = 1;
        cols.push(lr_constraint_residuals(cx, &chart.from_vec(&v)));
    }
    let rows = cols.first().map_or(0, |c| c.len());
    Ok(MatGfp::from_fn(rows, dim, cx.r.p(), |r, c| cols[c][r]))
}

/// The degree-n cochain space `C^n_LR` as a canonical subspace of the chart.
pub fn lr_cochain_space(cx: &Complexes, n: usize, budget: Budget) -> Result<Subspace, CohomologyError> {
    Ok(constraint_system(cx, n, budget)?.kernel_basis())
}

/// Differential without output validation, to build the chart matrix on
/// vectors that need not satisfy the constraints.
pub(crate) fn lr_differential_unvalidated(
    cx: &Complexes,
    c: &LrCochain,
) -> Result<LrCochain, CochainError> {
    let image = crate::cochain::fd_res(cx, &lr_embed(cx, c))?;
    let out = match (image.n, &image.third) {
        (2, Third::Map(t)) => LrCochain::D2 {
            mu: image.first.phi.clone(),
            omega: image.first.omega.clone().expect("omega present"),
            theta: t.clone(),
        },
        (n, Third::Pair(pr)) if n >= 3 => LrCochain::Dn {
            mu: image.first.phi.clone(),
            omega: image.first.omega.clone().expect("omega present"),
            theta: pr.phi.clone(),
            gamma: pr.omega.clone().expect("gamma present"),
        },
        _ => unreachable!("differential output shape"),
    };
    Ok(out)
}

/// Matrix of the degree-n Lie-Rinehart differential on the full chart.
pub fn lr_differential_matrix(cx: &Complexes, n: usize) -> Result<MatGfp, CohomologyError> {
    let chart_in = LrChart::new(cx, n);
    let chart_out = LrChart::new(cx, n + 1);
    let mut cols = Vec::with_capacity(chart_in.dim());
    for k in 0..chart_in.dim() {
        let mut v = vec![0u32; chart_in.dim()];
        v[k] = 1;
        let image = lr_differential_unvalidated(cx, &chart_in.from_vec(&v))?;
        cols.push(chart_out.to_vec(&image));
    }
    Ok(MatGfp::from_fn(chart_out.dim(), chart_in.dim(), cx.r.p(), |r, c| {
        cols[c][r]
    }))
}

/// Result of the characteristic-2 degree-2 computation: canonical bases of
/// the cocycle and coboundary spaces in the chart, the quotient dimension,
/// and membership verdicts for the named catalogue cocycles.
#[derive(Debug, Clone, Serialize)]
pub struct CohomologyResult {
    pub chart: LrChart,
    pub z_basis: Subspace,
    pub b_basis: Subspace,
    pub h_dim: usize,
    pub named_cocycle_matches: Vec<(String, bool)>,
}

/// `Z^2 / B^2 / H^2` of the bundle in characteristic 2. `Z` is the
/// intersection of the differential kernel with the constraint kernel; `B`
/// is the image of the valid degree-1 cochains under the differential.
pub fn compute_z2_b2_h2(r: &RlrAlgebra, budget: Budget) -> Result<CohomologyResult, CohomologyError> {
    if r.p().get() != 2 {
        return Err(CohomologyError::WrongCharacteristic(r.p().get()));
    }
    let cx = Complexes::new(r);
    let chart2 = LrChart::new(&cx, 2);
    let constraints = lr_cochain_space(&cx, 2, budget)?;
    let diff2 = lr_differential_matrix(&cx, 2)?;
    let z = diff2.kernel_basis().intersect(&constraints);

    let c1 = lr_cochain_space(&cx, 1, budget)?;
    let diff1 = lr_differential_matrix(&cx, 1)?;
    let b_vectors: Vec<Vec<u32>> = c1.basis().iter().map(|v| diff1.mul_vec(v)).collect();
    let b = Subspace::from_spanning(chart2.dim(), r.p(), b_vectors);
    assert!(
        b.is_contained_in(&z),
        "coboundaries must be cocycles; complex property violated"
    );
    let h_dim = z.dim() - b.dim();

    let named_cocycle_matches = reference_cocycles(&cx, &r.name)
        .into_iter()
        .map(|(name, c)| {
            let v = chart2.to_vec(&c);
            (name, z.contains(&v))
        })
        .collect();

    Ok(CohomologyResult {
        chart: chart2,
        z_basis: z,
        b_basis: b,
        h_dim,
        named_cocycle_matches,
    })
}

/// Chart of the plain restricted cochains `(phi, omega)` of degree n on a
/// Lie algebra with adjoint coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct ResChart {
    pub n: usize,
    pub dim: usize,
}

impl ResChart {
    pub fn new(l: &LiePresentation, n: usize) -> Self {
        ResChart { n, dim: l.dim }
    }

    pub fn len(&self) -> usize {
        let mu = combos(self.dim, self.n).len() * self.dim;
        let omega = if self.n >= 2 {
            self.dim * combos(self.dim, self.n - 2).len() * self.dim
        } else {
            0
        };
        mu + omega
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_vec(&self, pair: &ResPair) -> Vec<u32> {
        let mut out = Vec::new();
        for row in &pair.phi.table {
            out.extend_from_slice(row);
        }
        if let Some(om) = &pair.omega {
            for zrow in &om.table {
                for v in zrow {
                    out.extend_from_slice(v);
                }
            }
        }
        out
    }

    pub fn from_vec(&self, v: &[u32]) -> ResPair {
        assert_eq!(v.len(), self.len());
        let mut phi = AltForm::zero(self.n, self.dim, self.dim);
        let mu_len = phi.table.len() * self.dim;
        for (r, chunk) in v[..mu_len].chunks(self.dim).enumerate() {
            phi.table[r] = chunk.to_vec();
        }
        if self.n == 1 {
            return ResPair::linear(phi);
        }
        let mut omega = OmegaTable::zero(self.n, self.dim, self.dim);
        let zlen = combos(self.dim, self.n - 2).len();
        for (idx, chunk) in v[mu_len..].chunks(self.dim).enumerate() {
            omega.table[idx / zlen][idx % zlen] = chunk.to_vec();
        }
        ResPair::pair(phi, omega)
    }
}

/// Kernel of the degree-2 restricted differential on the `(mu, omega)`
/// chart of `C^2(L; L)`, characteristic 2.
pub fn compute_z2_res(l: &LiePresentation) -> Result<Subspace, CohomologyError> {
    if l.p.get() != 2 {
        return Err(CohomologyError::WrongCharacteristic(l.p.get()));
    }
    let ctx = ComplexCtx::adjoint(l);
    let chart2 = ResChart::new(l, 2);
    let chart3 = ResChart::new(l, 3);
    let mut cols = Vec::with_capacity(chart2.len());
    for k in 0..chart2.len() {
        let mut v = vec![0u32; chart2.len()];
        v[k] = 1;
        let image = crate::cochain::d_res(&chart2.from_vec(&v), &ctx)?;
        cols.push(chart3.to_vec(&image));
    }
    let m = MatGfp::from_fn(chart3.len(), chart2.len(), l.p, |r, c| cols[c][r]);
    Ok(m.kernel_basis())
}

/// The named degree-2 cocycles of the catalogue bundles, used as fixtures
/// and reported as membership verdicts. `mu1 = x (x) x* ^ y*`,
/// `mu2 = y (x) x* ^ y*`, `w1..w4` the elementary quadratic tables,
/// `th1(x)(e2) = e1, th1(y)(e2) = e2`, `th2(x)(e2) = e2, th2(y)(e2) = 0`.
pub fn reference_cocycles(cx: &Complexes, bundle_name: &str) -> Vec<(String, LrCochain)> {
    if cx.p() != 2 || cx.dim_l() != 2 || cx.r.a.dim != 2 {
        return Vec::new();
    }
    let der_to = |image: &[u32]| -> Vec<u32> {
        let mut m = MatGfp::zeros(2, 2, cx.r.p());
        for (i, &v) in image.iter().enumerate() {
            m.set(i, 1, v);
        }
        cx.der.coords(&m).expect("derivation of the catalogue algebra")
    };
    let mu = |val: &[u32]| {
        let mut f = AltForm::zero(2, 2, 2);
        f.set_entry(&[0, 1], val.to_vec());
        f
    };
    let om = |on_x: &[u32], on_y: &[u32]| {
        let mut o = OmegaTable::zero(2, 2, 2);
        o.table[0][0] = on_x.to_vec();
        o.table[1][0] = on_y.to_vec();
        o
    };
    let th = |on_x: &[u32], on_y: &[u32]| {
        let mut f = AltForm::zero(1, 2, cx.dim_der());
        f.table[0] = der_to(on_x);
        f.table[1] = der_to(on_y);
        f
    };
    let zero_th = AltForm::zero(1, 2, cx.dim_der());
    if bundle_name.starts_with("Lab0_A4") {
        vec![
            (
                "(mu1,w4,th1)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[1, 0]),
                    omega: om(&[0, 0], &[0, 1]),
                    theta: th(&[1, 0], &[0, 1]),
                },
            ),
            (
                "(mu2,0,th2)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[0, 1]),
                    omega: om(&[0, 0], &[0, 0]),
                    theta: th(&[0, 1], &[0, 0]),
                },
            ),
            (
                "(0,w1,0)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[0, 0]),
                    omega: om(&[1, 0], &[0, 0]),
                    theta: zero_th.clone(),
                },
            ),
            (
                "(0,w2,0)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[0, 0]),
                    omega: om(&[0, 1], &[0, 0]),
                    theta: zero_th,
                },
            ),
        ]
    } else if bundle_name.starts_with("Lab1_A4") {
        vec![
            (
                "(mu1+mu2,w4,th1)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[1, 1]),
                    omega: om(&[0, 0], &[0, 1]),
                    theta: th(&[1, 0], &[0, 1]),
                },
            ),
            (
                "(0,w1,0)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[0, 0]),
                    omega: om(&[1, 0], &[0, 0]),
                    theta: zero_th.clone(),
                },
            ),
            (
                "(0,w2,0)".to_string(),
                LrCochain::D2 {
                    mu: mu(&[0, 0]),
                    omega: om(&[0, 1], &[0, 0]),
                    theta: zero_th,
                },
            ),
        ]
    } else {
        Vec::new()
    }
}

/// Degree-2 object for characteristic p >= 3: alternating part, full
/// p-homogeneous value table for omega on every point of `L`, A-linear
/// theta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PCochain2 {
    pub mu: AltForm,
    /// `omega[rank(v)]` for every coordinate vector `v` of `L` (rank is
    /// the little-endian base-p counter).
    pub omega: Vec<Vec<u32>>,
    pub theta: AltForm,
}

/// Base-p little-endian rank of a coordinate vector.
pub fn point_rank(v: &[u32], p: u32) -> usize {
    let mut r = 0usize;
    for &c in v.iter().rev() {
        r = r * p as usize + c as usize;
    }
    r
}

impl PCochain2 {
    pub fn zero(cx: &Complexes) -> Self {
        let p = cx.p();
        let total = (p as usize).pow(cx.dim_l() as u32);
        PCochain2 {
            mu: AltForm::zero(2, cx.dim_l(), cx.dim_l()),
            omega: vec![vec![0; cx.dim_l()]; total],
            theta: AltForm::zero(1, cx.dim_l(), cx.dim_der()),
        }
    }

    pub fn omega_at(&self, v: &[u32], p: u32) -> &[u32] {
        &self.omega[point_rank(v, p)]
    }
}

/// Pointwise verification that a degree-2 triple is a deformation
/// 2-cocycle. The primary regime is p >= 3, where the induced-map
/// condition defined only in an external reference is reported as not
/// evaluated. At p = 2 the verifier also evaluates that condition (the
/// induced map is the known quadratic differential there) together with
/// the polarization consistency of the table, so its verdict agrees with
/// the characteristic-2 chart solver (tested).
pub fn verify_p_cocycle(
    r: &RlrAlgebra,
    c: &PCochain2,
    budget: Budget,
) -> Result<ReportSet, CohomologyError> {
    let p = r.p().get();
    let cx = Complexes::new(r);
    let dim_l = cx.dim_l();
    let dim_a = r.a.dim;
    let cost = (p as u64).pow(dim_a as u32) * (p as u64).pow(dim_l as u32);
    if cost > budget.0 {
        return Err(CohomologyError::BudgetExceeded(cost));
    }
    let mut set = ReportSet::new();
    let l_all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim_l, p).collect();
    let a_all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim_a, p).collect();

    let dmu = d_ce(&c.mu, &cx.ctx_ll);
    set.push(if dmu.is_zero() {
        CheckReport::pass("mu_ce_cocycle")
    } else {
        CheckReport::fail("mu_ce_cocycle", "d2_CE(mu) != 0")
    });

    let mut chk = CheckReport::pass("mu_second_slot_compat");
    'a2: for xi in 0..dim_l {
        let x = vec_ops::unit(dim_l, xi);
        for ai in 0..dim_a {
            let ea = vec_ops::unit(dim_a, ai);
            for yi in 0..dim_l {
                let y = vec_ops::unit(dim_l, yi);
                let ay = r.action.apply(&ea, &y, p);
                let lhs = c.mu.eval(&[&x, &ay], p);
                let mut rhs = r.action.apply(&ea, &c.mu.eval(&[&x, &y], p), p);
                let th = cx.der.matrix(&c.theta.eval(&[&x], p));
                vec_ops::add_assign(&mut rhs, &r.action.apply(&th.mul_vec(&ea), &y, p), p);
                if lhs != rhs {
                    chk = CheckReport::fail(
                        "mu_second_slot_compat",
                        format!("x=x{}, a=e{}, y=x{}", xi + 1, ai + 1, yi + 1),
                    );
                    break 'a2;
                }
            }
        }
    }
    set.push(chk);

    let mut chk = CheckReport::pass("theta_a_linear");
    'th: for ai in 0..dim_a {
        let ea = vec_ops::unit(dim_a, ai);
        for xi in 0..dim_l {
            let x = vec_ops::unit(dim_l, xi);
            let ax = r.action.apply(&ea, &x, p);
            let lhs = cx.der.matrix(&c.theta.eval(&[&ax], p));
            let rhs = r.a.mult_operator(&ea).matmul(&cx.der.matrix(&c.theta.eval(&[&x], p)));
            if lhs != rhs {
                chk = CheckReport::fail("theta_a_linear", format!("a=e{}, x=x{}", ai + 1, xi + 1));
                break 'th;
            }
        }
    }
    set.push(chk);

    // alpha_{mu,0}(theta) = rho o mu - d^1_CE theta, on basis pairs
    let dth = d_ce(&c.theta, &cx.ctx_lm);
    let mut chk = CheckReport::pass("alpha_vanishes");
    'al: for i in 0..dim_l {
        let x = vec_ops::unit(dim_l, i);
        for j in 0..dim_l {
            let y = vec_ops::unit(dim_l, j);
            let lhs = cx.rho_of(&c.mu.eval(&[&x, &y], p));
            let rhs = dth.eval(&[&x, &y], p);
            if lhs != rhs {
                chk = CheckReport::fail("alpha_vanishes", format!("x=x{}, y=x{}", i + 1, j + 1));
                break 'al;
            }
        }
    }
    set.push(chk);

    // beta_{omega,0}(theta)(x) = theta(x^[p]) + rho(omega(x))
    //  - ad_{rho(x)}^{p-1}(theta(x)), pointwise
    let mut chk = CheckReport::pass("beta_vanishes");
    for x in &l_all {
        let xp = r.l.pmap_eval(x);
        let mut acc = c.theta.eval(&[&xp], p);
        vec_ops::add_assign(&mut acc, &cx.rho_of(c.omega_at(x, p)), p);
        let rho_x = r.rho(x);
        let mut ad = cx.der.matrix(&c.theta.eval(&[x.as_slice()], p));
        for _ in 0..p - 1 {
            ad = rho_x.commutator(&ad);
        }
        let ad_coords = cx.der.coords(&ad).expect("Der(A) closed under bracket");
        vec_ops::add_assign(&mut acc, &vec_ops::neg(&ad_coords, p), p);
        if !vec_ops::is_zero(&acc) {
            chk = CheckReport::fail("beta_vanishes", format!("x={x:?}"));
            break;
        }
    }
    set.push(chk);

    let mut chk = CheckReport::pass("omega_p_homogeneous");
    'ph: for x in &l_all {
        for lam in 0..p {
            let lx = vec_ops::scale(lam, x, p);
            let mut lam_p = 1u32;
            for _ in 0..p {
                lam_p = mul_mod(lam_p, lam, p);
            }
            if c.omega_at(&lx, p) != vec_ops::scale(lam_p, c.omega_at(x, p), p).as_slice() {
                chk = CheckReport::fail("omega_p_homogeneous", format!("lambda={lam}, x={x:?}"));
                break 'ph;
            }
        }
    }
    set.push(chk);

    // omega(ax) - a^p omega(x)
    //   = a^{p-1} sum_i rho(x)^i theta(x) rho(x)^{p-2-i} (a) x, over A x L
    let mut chk = CheckReport::pass("omega_anchor_compat");
    'oc: for a in &a_all {
        for x in &l_all {
            let ax = r.action.apply(a, x, p);
            let mut lhs = c.omega_at(&ax, p).to_vec();
            let ap = r.a.power(a, p);
            vec_ops::add_assign(&mut lhs, &vec_ops::neg(&r.action.apply(&ap, c.omega_at(x, p), p), p), p);
            let rho_x = r.rho(x);
            let th_x = cx.der.matrix(&c.theta.eval(&[x.as_slice()], p));
            let mut sum_a = vec_ops::zero(dim_a);
            for i in 0..=(p - 2) {
                let op = rho_x.pow(i).matmul(&th_x).matmul(&rho_x.pow(p - 2 - i));
                vec_ops::add_assign(&mut sum_a, &op.mul_vec(a), p);
            }
            let apm1 = r.a.power(a, p - 1);
            let coef = r.a.product(&apm1, &sum_a);
            let rhs = r.action.apply(&coef, x, p);
            if lhs != rhs {
                chk = CheckReport::fail("omega_anchor_compat", format!("a={a:?}, x={x:?}"));
                break 'oc;
            }
        }
    }
    set.push(chk);

    if p == 2 {
        // the degree-2 induced map is available here: rebuild the pair
        // from the basis values and require polarization consistency and
        // a vanishing quadratic differential
        let mut omega = OmegaTable::zero(2, dim_l, dim_l);
        for i in 0..dim_l {
            omega.table[i][0] = c.omega_at(&vec_ops::unit(dim_l, i), p).to_vec();
        }
        let pair = ResPair::pair(c.mu.clone(), omega);
        let mut chk = CheckReport::pass("omega_polarization_consistent");
        'pol: for u in &l_all {
            for v in &l_all {
                let sum = vec_ops::add(u, v, p);
                let mut expect = c.omega_at(u, p).to_vec();
                vec_ops::add_assign(&mut expect, c.omega_at(v, p), p);
                vec_ops::add_assign(&mut expect, &c.mu.eval(&[u, v], p), p);
                if c.omega_at(&sum, p) != expect.as_slice() {
                    chk = CheckReport::fail("omega_polarization_consistent", format!("u={u:?}, v={v:?}"));
                    break 'pol;
                }
            }
        }
        set.push(chk);
        let dom = crate::cochain::delta_n(&pair, &cx.ctx_ll)?;
        set.push(if dom.is_zero() {
            CheckReport::pass("ind2_identity")
                .with_note("evaluated as the characteristic-2 quadratic differential")
        } else {
            CheckReport::fail("ind2_identity", "delta^2(omega) != 0")
                .with_note("evaluated as the characteristic-2 quadratic differential")
        });
    } else {
        set.push(CheckReport::not_evaluated(
            "ind2_identity",
            "the degree-2 induced map is defined only in an external reference",
        ));
    }
    Ok(set)
}

/// Test whether a p >= 3 deformation 2-cocycle is trivial against an
/// explicit candidate `(gamma, d)`. The candidate must satisfy the
/// degree-1 constraint; by default the printed p-semilinear form
/// `gamma(ax) = a^p gamma(x) + d(a) x` is enforced, with the a-linear
/// variant behind the flag. The omega component of the coboundary uses the
/// degree-1 induced map read as `gamma(x^[p]) - ad_x^{p-1}(gamma(x))`
/// (noted in the report); the other components are compared as printed.
pub fn verify_trivial_p_cocycle(
    r: &RlrAlgebra,
    c: &PCochain2,
    gamma: &MatGfp,
    d: &[u32],
    semilinear: bool,
    budget: Budget,
) -> Result<(bool, ReportSet), CohomologyError> {
    let p = r.p().get();
    if p < 3 {
        return Err(CohomologyError::WrongCharacteristic(p));
    }
    let cx = Complexes::new(r);
    let dim_l = cx.dim_l();
    let dim_a = r.a.dim;
    let cost = (p as u64).pow(dim_a as u32) * (p as u64).pow(dim_l as u32);
    if cost > budget.0 {
        return Err(CohomologyError::BudgetExceeded(cost));
    }
    let dmat = cx.der.matrix(d);

    for a in vec_ops::enumerate_all(dim_a, p) {
        for x in vec_ops::enumerate_all(dim_l, p) {
            let ax = r.action.apply(&a, &x, p);
            let lhs = gamma.mul_vec(&ax);
            let scale = if semilinear { r.a.power(&a, p) } else { a.clone() };
            let mut rhs = r.action.apply(&scale, &gamma.mul_vec(&x), p);
            vec_ops::add_assign(&mut rhs, &r.action.apply(&dmat.mul_vec(&a), &x, p), p);
            if lhs != rhs {
                return Err(CohomologyError::Candidate(format!(
                    "gamma(ax) law fails at a={a:?}, x={x:?} ({} variant)",
                    if semilinear { "p-semilinear" } else { "a-linear" }
                )));
            }
        }
    }

    let mut set = ReportSet::new();
    let gamma_form = AltForm {
        k: 1,
        src_dim: dim_l,
        val_dim: dim_l,
        table: (0..dim_l)
            .map(|j| gamma.mul_vec(&vec_ops::unit(dim_l, j)))
            .collect(),
    };

    let dmu = d_ce(&gamma_form, &cx.ctx_ll);
    let mu_ok = dmu == c.mu;
    set.push(if mu_ok {
        CheckReport::pass("mu_matches_coboundary")
    } else {
        CheckReport::fail("mu_matches_coboundary", "mu != d1_CE(gamma)")
    });

    let mut omega_ok = true;
    for x in vec_ops::enumerate_all(dim_l, p) {
        let mut expect = gamma.mul_vec(&r.l.pmap_eval(&x));
        let ad = r.l.ad_matrix(&x).pow(p - 1);
        vec_ops::add_assign(&mut expect, &vec_ops::neg(&ad.mul_vec(&gamma.mul_vec(&x)), p), p);
        if c.omega_at(&x, p) != expect.as_slice() {
            omega_ok = false;
            break;
        }
    }
    set.push(
        if omega_ok {
            CheckReport::pass("omega_matches_coboundary")
        } else {
            CheckReport::fail("omega_matches_coboundary", "omega != ind1(gamma)")
        }
        .with_note("degree-1 induced map read as gamma(x^[p]) - ad_x^{p-1}(gamma(x))"),
    );

    let mut theta_ok = true;
    for j in 0..dim_l {
        let x = vec_ops::unit(dim_l, j);
        let mut expect = cx.rho_of(&gamma.mul_vec(&x));
        let com = r.rho(&x).commutator(&dmat);
        let com_coords = cx.der.coords(&com).expect("Der(A) closed under bracket");
        vec_ops::add_assign(&mut expect, &vec_ops::neg(&com_coords, p), p);
        if c.theta.eval(&[&x], p) != expect {
            theta_ok = false;
            break;
        }
    }
    set.push(if theta_ok {
        CheckReport::pass("theta_matches_coboundary")
    } else {
        CheckReport::fail("theta_matches_coboundary", "theta != rho o gamma - [rho(.), d]")
    });

    Ok((mu_ok && omega_ok && theta_ok, set))
}

/// Deterministic pseudo-random vector in a subspace, for sampling tests.
pub fn sample_subspace(s: &Subspace, seed: u64) -> Vec<u32> {
    let p = s.modulus();
    let mut v = vec![0u32; s.ambient_dim()];
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    for b in s.basis() {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let c = ((state >> 33) % p as u64) as u32;
        if c != 0 {
            vec_ops::add_assign(&mut v, &vec_ops::scale(c, b, p), p);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{lr_differential, validate_lr};
    use crate::registry;

    fn cxof(r: &RlrAlgebra) -> Complexes {
        Complexes::new(r)
    }

    #[test]
    fn chart_round_trip() {
        let cx = cxof(&registry::lab0_a4());
        for n in 1..=4usize {
            let chart = LrChart::new(&cx, n);
            for seed in 0..10u64 {
                let v: Vec<u32> = (0..chart.dim())
                    .map(|i| ((seed >> (i % 16)) & 1) as u32)
                    .collect();
                let c = chart.from_vec(&v);
                assert_eq!(chart.to_vec(&c), v, "degree {n}");
            }
        }
    }

    #[test]
    fn residuals_agree_with_validator() {
        // the residual collector and the reporting validator must accept
        // exactly the same cochains
        for r in registry::char2_bundles() {
            let cx = cxof(&r);
            for n in 1..=2usize {
                let chart = LrChart::new(&cx, n);
                for rank in 0..(1u32 << chart.dim().min(12)) {
                    let v: Vec<u32> = (0..chart.dim()).map(|i| (rank >> i) & 1).collect();
                    let c = chart.from_vec(&v);
                    let by_residual = lr_constraint_residuals(&cx, &c).iter().all(|&x| x == 0);
                    let by_validator = validate_lr(&cx, &c).all_passed();
                    assert_eq!(by_residual, by_validator, "{} degree {n} rank {rank}", r.name);
                }
            }
        }
    }

    #[test]
    fn constraint_kernel_dimensions() {
        // hand-counted: C^1_LR and C^2_LR of the A4-action bundles are
        // 4-dimensional
        for r in registry::char2_bundles() {
            let cx = cxof(&r);
            let c1 = lr_cochain_space(&cx, 1, Budget::default()).unwrap();
            assert_eq!(c1.dim(), 4, "{} degree 1", r.name);
            let c2 = lr_cochain_space(&cx, 2, Budget::default()).unwrap();
            assert_eq!(c2.dim(), 4, "{} degree 2", r.name);
        }
    }

    #[test]
    fn lab0_z2_contains_reference_cocycles_and_has_dim_4() {
        let r = registry::lab0_a4();
        let res = compute_z2_b2_h2(&r, Budget::default()).unwrap();
        assert_eq!(res.z_basis.dim(), 4);
        assert_eq!(res.b_basis.dim(), 0);
        assert_eq!(res.h_dim, 4);
        assert_eq!(res.named_cocycle_matches.len(), 4);
        for (name, member) in &res.named_cocycle_matches {
            assert!(member, "{name} should lie in Z^2");
        }
    }

    #[test]
    fn lab0_z2_matches_brute_force_oracle() {
        // Enumerate the entire degree-2 chart and test membership by the
        // defining conditions (constraint validation + vanishing
        // differential), independent of the kernel solver.
        let r = registry::lab0_a4();
        let cx = cxof(&r);
        let chart = LrChart::new(&cx, 2);
        let res = compute_z2_b2_h2(&r, Budget::default()).unwrap();
        let mut oracle_members = 0usize;
        for rank in 0..(1u32 << chart.dim()) {
            let v: Vec<u32> = (0..chart.dim()).map(|i| (rank >> i) & 1).collect();
            let c = chart.from_vec(&v);
            let valid = validate_lr(&cx, &c).all_passed();
            let closed = valid && lr_differential(&cx, &c).map(|d| d.is_zero()).unwrap_or(false);
            let in_z = res.z_basis.contains(&v);
            assert_eq!(closed, in_z, "rank {rank}");
            if closed {
                oracle_members += 1;
            }
        }
        assert_eq!(oracle_members, 1 << res.z_basis.dim());
    }

    #[test]
    fn rigid_h2_vanishes() {
        // Z^2 = B^2 for the rigid bundle: every cocycle is the transport
        // infinitesimal of an automorphism, so H^2 = 0.
        let r = registry::rigid_a4();
        let res = compute_z2_b2_h2(&r, Budget::default()).unwrap();
        assert_eq!(res.z_basis, res.b_basis);
        assert_eq!(res.h_dim, 0);
        assert_eq!(res.z_basis.dim(), 2);
    }

    #[test]
    fn lab1_z2_b2_for_all_lambda() {
        for (l1, l2) in [(1, 0), (1, 1), (0, 1)] {
            let r = registry::lab1_a4(l1, l2);
            let res = compute_z2_b2_h2(&r, Budget::default()).unwrap();
            assert_eq!(res.z_basis.dim(), 2, "lambda ({l1},{l2})");
            assert_eq!(res.b_basis.dim(), 2, "lambda ({l1},{l2})");
            assert_eq!(res.h_dim, 0);
            for (name, member) in &res.named_cocycle_matches {
                if name == "(0,w1,0)" || name == "(0,w2,0)" {
                    assert!(member, "{name}");
                }
            }
        }
    }

    #[test]
    fn z2_res_dimensions() {
        assert_eq!(compute_z2_res(&registry::lab0_a4().l).unwrap().dim(), 6);
        assert_eq!(compute_z2_res(&registry::lab1_a4(1, 0).l).unwrap().dim(), 4);
        assert_eq!(compute_z2_res(&registry::rigid_a4().l).unwrap().dim(), 2);
    }

    #[test]
    fn verify_p_cocycle_zero_passes() {
        let r = registry::toy_t2_p3();
        let cx = cxof(&r);
        let c = PCochain2::zero(&cx);
        let rep = verify_p_cocycle(&r, &c, Budget::default()).unwrap();
        assert!(rep.all_passed(), "failures: {:?}", rep.failed_names());
    }

    #[test]
    fn verify_p_cocycle_cube_map_oracle() {
        // p = 3, abelian L, zero anchor, mu = 0, theta = 0, omega the
        // coordinate cube map: brute-force the verdicts.
        let r = registry::toy_t1_p3();
        let cx = cxof(&r);
        let p = 3u32;
        let mut c = PCochain2::zero(&cx);
        for v in vec_ops::enumerate_all(2, p) {
            let cube: Vec<u32> = v.iter().map(|&t| mul_mod(mul_mod(t, t, p), t, p)).collect();
            c.omega[point_rank(&v, p)] = cube;
        }
        let rep = verify_p_cocycle(&r, &c, Budget::default()).unwrap();
        let mut anchor_ok = true;
        for a in vec_ops::enumerate_all(2, p) {
            for x in vec_ops::enumerate_all(2, p) {
                let ax = r.action.apply(&a, &x, p);
                let lhs = c.omega_at(&ax, p).to_vec();
                let a3 = r.a.power(&a, 3);
                let rhs = r.action.apply(&a3, c.omega_at(&x, p), p);
                if lhs != rhs {
                    anchor_ok = false;
                }
            }
        }
        let reported = rep
            .checks
            .iter()
            .find(|c| c.name == "omega_anchor_compat")
            .unwrap()
            .passed();
        assert_eq!(reported, anchor_ok);
        assert!(rep
            .checks
            .iter()
            .find(|c| c.name == "omega_p_homogeneous")
            .unwrap()
            .passed());
    }

    #[test]
    fn trivial_p_cocycle_round_trip() {
        let r = registry::toy_t3_p3();
        let cx = cxof(&r);
        let p = 3u32;
        for (g11, g22) in [(1u32, 0u32), (2, 1), (0, 2)] {
            // diagonal gammas satisfy the p-semilinear law with d = 0 here
            let gamma = MatGfp::from_rows(vec![vec![g11, 0], vec![0, g22]], 2, r.p());
            let d = vec_ops::zero(cx.dim_der());
            let gamma_form = AltForm {
                k: 1,
                src_dim: 2,
                val_dim: 2,
                table: (0..2).map(|j| gamma.mul_vec(&vec_ops::unit(2, j))).collect(),
            };
            let mu = d_ce(&gamma_form, &cx.ctx_ll);
            let mut omega = vec![vec![0u32; 2]; 9];
            for x in vec_ops::enumerate_all(2, p) {
                let mut val = gamma.mul_vec(&r.l.pmap_eval(&x));
                let ad = r.l.ad_matrix(&x).pow(p - 1);
                vec_ops::add_assign(&mut val, &vec_ops::neg(&ad.mul_vec(&gamma.mul_vec(&x)), p), p);
                omega[point_rank(&x, p)] = val;
            }
            let theta = AltForm::zero(1, 2, cx.dim_der());
            let c = PCochain2 { mu, omega, theta };
            let (trivial, _) =
                verify_trivial_p_cocycle(&r, &c, &gamma, &d, true, Budget::default()).unwrap();
            assert!(trivial, "gamma diag({g11},{g22})");
        }
        // zero cochain against zero candidate
        let z = PCochain2::zero(&cx);
        let zg = MatGfp::zeros(2, 2, r.p());
        let d = vec_ops::zero(cx.dim_der());
        let (trivial, _) = verify_trivial_p_cocycle(&r, &z, &zg, &d, true, Budget::default()).unwrap();
        assert!(trivial);
    }

    #[test]
    fn non_cocycle_is_never_a_coboundary() {
        // On the three-dimensional Heisenberg fixture the 2-form
        // mu = y (x) y* ^ z* has d^2_CE(mu) != 0, so it fails the cocycle
        // conditions and no candidate (gamma, d) expresses it.
        let r = registry::heisenberg_p3();
        let cx = cxof(&r);
        let p = 3;
        let mut c = PCochain2::zero(&cx);
        c.mu.set_entry(&[1, 2], vec![0, 1, 0]);
        let rep = verify_p_cocycle(&r, &c, Budget::default()).unwrap();
        assert!(!rep.all_passed());
        assert!(rep.failed_names().contains(&"mu_ce_cocycle"));
        let d = vec_ops::zero(cx.dim_der());
        // spanning set of candidates: all elementary gammas and sums of two
        let mut gammas: Vec<MatGfp> = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let mut g = MatGfp::zeros(3, 3, r.p());
                g.set(i, j, 1);
                gammas.push(g);
            }
        }
        let pairs: Vec<MatGfp> = gammas
            .iter()
            .flat_map(|a| gammas.iter().map(move |b| a.add(b)))
            .collect();
        gammas.extend(pairs);
        let _ = p;
        for gamma in &gammas {
            match verify_trivial_p_cocycle(&r, &c, gamma, &d, true, Budget::default()) {
                Ok((trivial, _)) => assert!(!trivial),
                Err(CohomologyError::Candidate(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[cfg(test)]
mod verifier_consistency_tests {
    use super::*;
    use crate::registry;

    #[test]
    fn p2_verifier_agrees_with_chart_solver() {
        // internal consistency: running the pointwise verifier at p = 2
        // reproduces the solver's degree-2 cocycle membership exactly
        for r in [registry::lab0_a4(), registry::rigid_a4(), registry::lab1_a4(1, 0)] {
            let cx = Complexes::new(&r);
            let chart = LrChart::new(&cx, 2);
            let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
            for rank in 0..(1u32 << chart.dim()) {
                let v: Vec<u32> = (0..chart.dim()).map(|i| (rank >> i) & 1).collect();
                let LrCochain::D2 { mu, omega, theta } = chart.from_vec(&v) else {
                    panic!("degree-2 chart")
                };
                // inflate the basis table to a full point table
                let pair = ResPair::pair(mu.clone(), omega);
                let mut table = vec![vec![0u32; 2]; 4];
                for x in vec_ops::enumerate_all(2, 2) {
                    table[point_rank(&x, 2)] = pair.eval_omega(&x, &[], 2).unwrap();
                }
                let c = PCochain2 {
                    mu,
                    omega: table,
                    theta,
                };
                let rep = verify_p_cocycle(&r, &c, Budget::default()).unwrap();
                let in_z = coh.z_basis.contains(&v);
                assert_eq!(rep.all_passed(), in_z, "{} rank {rank}", r.name);
            }
        }
    }
}

#[cfg(test)]
mod constraint_system_tests {
    use super::*;
    use crate::algebra::{AlgebraPresentation, LiePresentation, ModuleAction, RlrAlgebra};
    use crate::registry;

    #[test]
    fn rigid_constraints_force_theta_from_mu() {
        // on the rigid bundle the second-slot compatibility pins theta to
        // mu; in particular mu = 0 forces theta = 0
        let r = registry::rigid_a4();
        let cx = Complexes::new(&r);
        let space = lr_cochain_space(&cx, 2, Budget::default()).unwrap();
        let chart = LrChart::new(&cx, 2);
        for rank in 0..(1u32 << space.dim()) {
            let mut v = vec![0u32; chart.dim()];
            for (b, basis_vec) in space.basis().iter().enumerate() {
                if (rank >> b) & 1 == 1 {
                    vec_ops::add_assign(&mut v, basis_vec, 2);
                }
            }
            let LrCochain::D2 { mu, theta, .. } = chart.from_vec(&v) else {
                panic!("degree-2 chart")
            };
            if mu.is_zero() {
                assert!(theta.is_zero(), "rank {rank}: mu = 0 must force theta = 0");
            }
        }
    }

    #[test]
    fn zero_algebra_gives_zero_constraint_matrix() {
        // with every structure map zero the compatibility rows vanish
        // identically
        let p = crate::gfp::Prime::new(2).unwrap();
        let a = AlgebraPresentation::new("Z", p, vec!["e1".into(), "e2".into()], &[]);
        let l = LiePresentation::new(
            "Zl",
            p,
            vec!["x".into(), "y".into()],
            &[],
            vec![vec![0, 0], vec![0, 0]],
        );
        let r = RlrAlgebra {
            name: "zero".into(),
            a,
            l,
            action: ModuleAction::new(2, 2, &[]),
            anchor: vec![MatGfp::zeros(2, 2, p), MatGfp::zeros(2, 2, p)],
        };
        let cx = Complexes::new(&r);
        let m = constraint_system(&cx, 2, Budget::default()).unwrap();
        assert!(m.is_zero());
        assert_eq!(m.kernel_basis().dim(), LrChart::new(&cx, 2).dim());
    }
}

#[cfg(test)]
mod coboundary_route_tests {
    use super::*;
    use crate::cochain::{fd_res, lr_project, MorphCochain, ResPair, Third};
    use crate::registry;

    #[test]
    fn b2_matches_full_morphism_image_intersection() {
        // Dual route for the coboundary space: enumerate every degree-1
        // cochain of the full morphism complex (first component, middle
        // component on Der(A), constant third component), push through the
        // differential, and keep the images that land in the embedded
        // middle-zero chart as valid degree-2 cochains. The span must be
        // exactly the solver's B^2.
        for r in registry::char2_bundles() {
            let cx = Complexes::new(&r);
            let chart = LrChart::new(&cx, 2);
            let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
            let dim_l = cx.dim_l();
            let dim_der = cx.dim_der();
            let total_bits = dim_l * dim_l + dim_der * dim_der + dim_der;
            assert!(total_bits <= 12);
            let mut image_vectors = Vec::new();
            for rank in 0..(1u32 << total_bits) {
                let mut bits = (0..total_bits).map(|i| (rank >> i) & 1);
                let mut first = ResPair::zero(1, dim_l, dim_l);
                for row in first.phi.table.iter_mut() {
                    for v in row.iter_mut() {
                        *v = bits.next().unwrap();
                    }
                }
                let mut second = ResPair::zero(1, dim_der, dim_der);
                for row in second.phi.table.iter_mut() {
                    for v in row.iter_mut() {
                        *v = bits.next().unwrap();
                    }
                }
                let m: Vec<u32> = (0..dim_der).map(|_| bits.next().unwrap()).collect();
                let mc = MorphCochain {
                    n: 1,
                    first,
                    second,
                    third: Third::Const(m),
                };
                let image = fd_res(&cx, &mc).unwrap();
                if let Ok(c) = lr_project(&cx, &image) {
                    image_vectors.push(chart.to_vec(&c));
                }
            }
            let span = Subspace::from_spanning(chart.dim(), r.p(), image_vectors);
            assert_eq!(span, coh.b_basis, "{}", r.name);
        }
    }
}
