//! Restricted cochains and every differential map.
//!
//! A degree-n restricted cochain in characteristic 2 is a pair `(phi, omega)`
//! where `phi` is alternating n-linear and `omega` is quadratic in its first
//! slot (polarized by `phi`) and alternating multilinear in the remaining
//! `n - 2` slots. Cochains are stored on basis data only: `phi` on strictly
//! increasing index tuples, `omega` on (basis first argument, increasing
//! z-tuple) pairs. All other evaluations polarize.
//!
//! Three complexes share the machinery, distinguished by their evaluation
//! context: cochains on `L` valued in `L` (adjoint action), cochains on
//! `Der(A)` valued in `Der(A)` (adjoint), and cochains on `L` valued in
//! `Der(A)` (action `x . D = [rho(x), D]`). The morphism complex pairs all
//! three; the Lie-Rinehart sub-complex is its middle-zero part with the
//! compatibility constraints of the deformation theory.

use crate::algebra::{compute_derivations, DerSpace, LiePresentation, RlrAlgebra};
use crate::gfp::{mul_mod, neg_mod, vec_ops, MatGfp};
use crate::report::{CheckReport, ReportSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CochainError {
    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("operation requires characteristic 2, modulus is {0}")]
    WrongCharacteristic(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("projection rejected: {0}")]
    Projection(String),
    #[error("differential output violates a Lie-Rinehart constraint: {0}")]
    OutputConstraint(String),
}

/// Strictly increasing index tuples of length `k` drawn from `0..dim`,
/// lexicographic.
pub fn combos(dim: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > dim {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k - 1;
        while cur[i] == i + dim - k {
            if i == 0 {
                return out;
            }
            i -= 1;
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn combo_rank(list: &[Vec<usize>], combo: &[usize]) -> usize {
    list.iter()
        .position(|c| c.as_slice() == combo)
        .expect("combo in range")
}

/// All length-k index tuples, repeats allowed.
pub(crate) fn tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for i in 0..dim {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Sort an index tuple, returning the sorted tuple and whether the sorting
/// permutation is odd; None when the tuple has a repeated index.
fn sort_with_parity(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut swaps = 0usize;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, swaps % 2 == 1))
}

/// Alternating multilinear form: `k` slots on a `src_dim`-dimensional
/// space, values of dimension `val_dim`, stored on increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltForm {
    pub k: usize,
    pub src_dim: usize,
    pub val_dim: usize,
    pub table: Vec<Vec<u32>>,
}

impl AltForm {
    pub fn zero(k: usize, src_dim: usize, val_dim: usize) -> Self {
        let len = combos(src_dim, k).len();
        AltForm {
            k,
            src_dim,
            val_dim,
            table: vec![vec![0; val_dim]; len],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| vec_ops::is_zero(v))
    }

    pub fn add(&self, rhs: &AltForm, p: u32) -> AltForm {
        assert_eq!(
            (self.k, self.src_dim, self.val_dim),
            (rhs.k, rhs.src_dim, rhs.val_dim)
        );
        AltForm {
            k: self.k,
            src_dim: self.src_dim,
            val_dim: self.val_dim,
            table: self
                .table
                .iter()
                .zip(&rhs.table)
                .map(|(a, b)| vec_ops::add(a, b, p))
                .collect(),
        }
    }

    pub fn neg(&self, p: u32) -> AltForm {
        AltForm {
            k: self.k,
            src_dim: self.src_dim,
            val_dim: self.val_dim,
            table: self.table.iter().map(|a| vec_ops::neg(a, p)).collect(),
        }
    }

    pub fn entry(&self, combo: &[usize]) -> &[u32] {
        let list = combos(self.src_dim, self.k);
        &self.table[combo_rank(&list, combo)]
    }

    pub fn set_entry(&mut self, combo: &[usize], v: Vec<u32>) {
        let list = combos(self.src_dim, self.k);
        let r = combo_rank(&list, combo);
        self.table[r] = v;
    }

    /// Multilinear alternating evaluation at arbitrary coordinate vectors;
    /// signs are permutation parities mod p (invisible when p = 2).
    pub fn eval(&self, args: &[&[u32]], p: u32) -> Vec<u32> {
        assert_eq!(args.len(), self.k, "AltForm arity");
        if self.k == 0 {
            return self.table[0].clone();
        }
        let list = combos(self.src_dim, self.k);
        let mut out = vec_ops::zero(self.val_dim);
        let mut idx = vec![0usize; self.k];
        'outer: loop {
            let mut coeff = 1u32;
            for (s, &i) in idx.iter().enumerate() {
                coeff = mul_mod(coeff, args[s][i], p);
                if coeff == 0 {
                    break;
                }
            }
            if coeff != 0 {
                if let Some((sorted, odd)) = sort_with_parity(&idx) {
                    let r = combo_rank(&list, &sorted);
                    let c = if odd { neg_mod(coeff, p) } else { coeff };
                    vec_ops::add_assign(&mut out, &vec_ops::scale(c, &self.table[r], p), p);
                }
            }
            for s in (0..self.k).rev() {
                idx[s] += 1;
                if idx[s] < self.src_dim {
                    continue 'outer;
                }
                idx[s] = 0;
                if s == 0 {
                    break 'outer;
                }
            }
        }
        out
    }
}

/// Quadratic part of a restricted cochain of degree `n >= 2`:
/// `omega(e_i; z-tuple)` for every basis first argument and increasing
/// z-tuple of length `n - 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTable {
    pub n: usize,
    pub src_dim: usize,
    pub val_dim: usize,
    /// `table[i][z_rank]`
    pub table: Vec<Vec<Vec<u32>>>,
}

impl OmegaTable {
    pub fn zero(n: usize, src_dim: usize, val_dim: usize) -> Self {
        assert!(n >= 2);
        let zlen = combos(src_dim, n - 2).len();
        OmegaTable {
            n,
            src_dim,
            val_dim,
            table: vec![vec![vec![0; val_dim]; zlen]; src_dim],
        }
    }

    pub fn z_arity(&self) -> usize {
        self.n - 2
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(|v| vec_ops::is_zero(v))
    }

    pub fn add(&self, rhs: &OmegaTable, p: u32) -> OmegaTable {
        assert_eq!(
            (self.n, self.src_dim, self.val_dim),
            (rhs.n, rhs.src_dim, rhs.val_dim)
        );
        let mut out = self.clone();
        for (a, b) in out.table.iter_mut().zip(&rhs.table) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = vec_ops::add(x, y, p);
            }
        }
        out
    }
}

/// A restricted cochain: degree 1 is a bare linear map, degree `n >= 2`
/// pairs the alternating part with its omega table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResPair {
    pub n: usize,
    pub phi: AltForm,
    pub omega: Option<OmegaTable>,
}

impl ResPair {
    pub fn linear(phi: AltForm) -> Self {
        assert_eq!(phi.k, 1);
        ResPair { n: 1, phi, omega: None }
    }

    pub fn pair(phi: AltForm, omega: OmegaTable) -> Self {
        assert_eq!(phi.k, omega.n);
        assert_eq!(phi.src_dim, omega.src_dim);
        assert_eq!(phi.val_dim, omega.val_dim);
        ResPair {
            n: phi.k,
            phi,
            omega: Some(omega),
        }
    }

    pub fn zero(n: usize, src_dim: usize, val_dim: usize) -> Self {
        if n == 1 {
            ResPair::linear(AltForm::zero(1, src_dim, val_dim))
        } else {
            ResPair::pair(
                AltForm::zero(n, src_dim, val_dim),
                OmegaTable::zero(n, src_dim, val_dim),
            )
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero() && self.omega.as_ref().map_or(true, |o| o.is_zero())
    }

    pub fn add(&self, rhs: &ResPair, p: u32) -> ResPair {
        assert_eq!(self.n, rhs.n);
        ResPair {
            n: self.n,
            phi: self.phi.add(&rhs.phi, p),
            omega: match (&self.omega, &rhs.omega) {
                (Some(a), Some(b)) => Some(a.add(b, p)),
                (None, None) => None,
                _ => panic!("omega shape mismatch"),
            },
        }
    }

    /// Polarized evaluation of the omega part:
    /// `omega(sum c_i e_i; Z) = sum c_i^2 omega(e_i; Z)
    ///  + sum_{i<j} c_i c_j phi(e_i, e_j, Z)`,
    /// alternating multilinear in the Z slots.
    pub fn eval_omega(&self, x: &[u32], zargs: &[&[u32]], p: u32) -> Result<Vec<u32>, CochainError> {
        let omega = self
            .omega
            .as_ref()
            .ok_or_else(|| CochainError::Shape("degree-1 cochain has no omega part".into()))?;
        if zargs.len() != omega.z_arity() {
            return Err(CochainError::Arity {
                expected: omega.z_arity(),
                got: zargs.len(),
            });
        }
        let zlist = combos(self.phi.src_dim, omega.z_arity());
        let mut out = vec_ops::zero(self.phi.val_dim);
        // coefficients of the z-tuple against sorted basis combos
        let mut zcoefs: Vec<(usize, u32)> = Vec::new();
        if zargs.is_empty() {
            zcoefs.push((0, 1));
        } else {
            let mut idx = vec![0usize; zargs.len()];
            let mut acc: Vec<u32> = vec![0; zlist.len()];
            'outer: loop {
                let mut coeff = 1u32;
                for (s, &i) in idx.iter().enumerate() {
                    coeff = mul_mod(coeff, zargs[s][i], p);
                    if coeff == 0 {
                        break;
                    }
                }
                if coeff != 0 {
                    if let Some((sorted, odd)) = sort_with_parity(&idx) {
                        let r = combo_rank(&zlist, &sorted);
                        let c = if odd { neg_mod(coeff, p) } else { coeff };
                        acc[r] = crate::gfp::add_mod(acc[r], c, p);
                    }
                }
                for s in (0..idx.len()).rev() {
                    idx[s] += 1;
                    if idx[s] < self.phi.src_dim {
                        continue 'outer;
                    }
                    idx[s] = 0;
                    if s == 0 {
                        break 'outer;
                    }
                }
            }
            for (r, &c) in acc.iter().enumerate() {
                if c != 0 {
                    zcoefs.push((r, c));
                }
            }
        }
        for &(zr, zc) in &zcoefs {
            let zcombo = &zlist[zr];
            let zunits: Vec<Vec<u32>> = zcombo
                .iter()
                .map(|&z| vec_ops::unit(self.phi.src_dim, z))
                .collect();
            for (i, &ci) in x.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                let c2 = mul_mod(mul_mod(ci, ci, p), zc, p);
                vec_ops::add_assign(&mut out, &vec_ops::scale(c2, &omega.table[i][zr], p), p);
            }
            for i in 0..x.len() {
                if x[i] == 0 {
                    continue;
                }
                for j in i + 1..x.len() {
                    if x[j] == 0 {
                        continue;
                    }
                    let c = mul_mod(mul_mod(x[i], x[j], p), zc, p);
                    let ei = vec_ops::unit(self.phi.src_dim, i);
                    let ej = vec_ops::unit(self.phi.src_dim, j);
                    let mut args: Vec<&[u32]> = vec![&ei, &ej];
                    for z in &zunits {
                        args.push(z);
                    }
                    let term = self.phi.eval(&args, p);
                    vec_ops::add_assign(&mut out, &vec_ops::scale(c, &term, p), p);
                }
            }
        }
        Ok(out)
    }
}

/// Evaluation context of one complex: source restricted Lie algebra plus
/// the action of its basis on the value space.
#[derive(Debug, Clone)]
pub struct ComplexCtx {
    pub src: LiePresentation,
    pub val_dim: usize,
    pub act: Vec<MatGfp>,
}

impl ComplexCtx {
    pub fn p(&self) -> u32 {
        self.src.p.get()
    }

    pub fn act_vec(&self, x: &[u32], v: &[u32]) -> Vec<u32> {
        let p = self.p();
        let mut out = vec_ops::zero(self.val_dim);
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                vec_ops::add_assign(&mut out, &vec_ops::scale(c, &self.act[j].mul_vec(v), p), p);
            }
        }
        out
    }

    pub fn adjoint(l: &LiePresentation) -> Self {
        let act = (0..l.dim)
            .map(|j| l.ad_matrix(&vec_ops::unit(l.dim, j)))
            .collect();
        ComplexCtx {
            src: l.clone(),
            val_dim: l.dim,
            act,
        }
    }
}

/// Chevalley-Eilenberg differential with standard signs (invisible in
/// characteristic 2):
/// `d phi(x_0..x_n) = sum_i (-1)^i x_i . phi(..omit i..)
///  + sum_{i<j} (-1)^{i+j} phi([x_i,x_j], ..omit i,j..)`.
pub fn d_ce(phi: &AltForm, ctx: &ComplexCtx) -> AltForm {
    let p = ctx.p();
    let n = phi.k;
    let dim = phi.src_dim;
    let clist = combos(dim, n + 1);
    let mut out = AltForm::zero(n + 1, dim, phi.val_dim);
    for (r, combo) in clist.iter().enumerate() {
        let mut acc = vec_ops::zero(phi.val_dim);
        for (i, &ci) in combo.iter().enumerate() {
            let rest: Vec<usize> = combo
                .iter()
                .enumerate()
                .filter(|&(s, _)| s != i)
                .map(|(_, &c)| c)
                .collect();
            let term = ctx.act[ci].mul_vec(phi.entry(&rest));
            let signed = if i % 2 == 0 { term } else { vec_ops::neg(&term, p) };
            vec_ops::add_assign(&mut acc, &signed, p);
        }
        for i in 0..combo.len() {
            for j in i + 1..combo.len() {
                let bij = ctx
                    .src
                    .bracket_vec(&vec_ops::unit(dim, combo[i]), &vec_ops::unit(dim, combo[j]));
                if vec_ops::is_zero(&bij) {
                    continue;
                }
                let rest: Vec<usize> = combo
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != i && s != j)
                    .map(|(_, &c)| c)
                    .collect();
                let runits: Vec<Vec<u32>> = rest.iter().map(|&c| vec_ops::unit(dim, c)).collect();
                let mut args: Vec<&[u32]> = vec![&bij];
                for u in &runits {
                    args.push(u);
                }
                let term = phi.eval(&args, p);
                // 0-based (i,j) carries the 1-based sign (-1)^{i+j+2} = (-1)^{i+j}
                let signed = if (i + j) % 2 == 0 { term } else { vec_ops::neg(&term, p) };
                vec_ops::add_assign(&mut acc, &signed, p);
            }
        }
        out.table[r] = acc;
    }
    out
}

/// Char-2 induced map on the quadratic part, degree 1:
/// `delta^1 phi(x) = phi(x^[2]) + x . phi(x)`.
pub fn delta1(phi: &AltForm, ctx: &ComplexCtx) -> Result<OmegaTable, CochainError> {
    if ctx.p() != 2 {
        return Err(CochainError::WrongCharacteristic(ctx.p()));
    }
    assert_eq!(phi.k, 1);
    let dim = phi.src_dim;
    let mut out = OmegaTable::zero(2, dim, phi.val_dim);
    for a in 0..dim {
        let ea = vec_ops::unit(dim, a);
        let pm = ctx.src.pmap_eval(&ea);
        let mut acc = phi.eval(&[&pm], 2);
        let val = phi.eval(&[&ea], 2);
        vec_ops::add_assign(&mut acc, &ctx.act_vec(&ea, &val), 2);
        out.table[a][0] = acc;
    }
    Ok(out)
}

/// Char-2 induced map on the quadratic part, degree `n >= 2`:
/// `delta^n omega(x, z_2..z_n) = x . phi(x, Z) + sum_i z_i . omega(x, Z\z_i)
///  + phi(x^[2], Z) + sum_i phi([x, z_i], x, Z\z_i)
///  + sum_{i<j} omega(x, [z_i,z_j], Z\{z_i,z_j})`.
pub fn delta_n(pair: &ResPair, ctx: &ComplexCtx) -> Result<OmegaTable, CochainError> {
    if ctx.p() != 2 {
        return Err(CochainError::WrongCharacteristic(ctx.p()));
    }
    let n = pair.n;
    assert!(n >= 2);
    let dim = pair.phi.src_dim;
    let vd = pair.phi.val_dim;
    let zlist = combos(dim, n - 1);
    let mut out = OmegaTable::zero(n + 1, dim, vd);
    for a in 0..dim {
        let ea = vec_ops::unit(dim, a);
        let pm = ctx.src.pmap_eval(&ea);
        for (zr, zcombo) in zlist.iter().enumerate() {
            let zunits: Vec<Vec<u32>> = zcombo.iter().map(|&z| vec_ops::unit(dim, z)).collect();
            let mut acc = vec_ops::zero(vd);

            {
                let mut args: Vec<&[u32]> = vec![&ea];
                for z in &zunits {
                    args.push(z);
                }
                let v = pair.phi.eval(&args, 2);
                vec_ops::add_assign(&mut acc, &ctx.act_vec(&ea, &v), 2);
            }
            for i in 0..zcombo.len() {
                let rest: Vec<&[u32]> = zunits
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != i)
                    .map(|(_, z)| z.as_slice())
                    .collect();
                let v = pair.eval_omega(&ea, &rest, 2)?;
                vec_ops::add_assign(&mut acc, &ctx.act_vec(&zunits[i], &v), 2);
            }
            {
                let mut args: Vec<&[u32]> = vec![&pm];
                for z in &zunits {
                    args.push(z);
                }
                vec_ops::add_assign(&mut acc, &pair.phi.eval(&args, 2), 2);
            }
            for i in 0..zcombo.len() {
                let b = ctx.src.bracket_vec(&ea, &zunits[i]);
                if vec_ops::is_zero(&b) {
                    continue;
                }
                let mut args: Vec<&[u32]> = vec![&b, &ea];
                for (s, z) in zunits.iter().enumerate() {
                    if s != i {
                        args.push(z);
                    }
                }
                vec_ops::add_assign(&mut acc, &pair.phi.eval(&args, 2), 2);
            }
            for i in 0..zcombo.len() {
                for j in i + 1..zcombo.len() {
                    let b = ctx.src.bracket_vec(&zunits[i], &zunits[j]);
                    if vec_ops::is_zero(&b) {
                        continue;
                    }
                    let mut zargs: Vec<&[u32]> = vec![&b];
                    for (s, z) in zunits.iter().enumerate() {
                        if s != i && s != j {
                            zargs.push(z);
                        }
                    }
                    let v = pair.eval_omega(&ea, &zargs, 2)?;
                    vec_ops::add_assign(&mut acc, &v, 2);
                }
            }
            out.table[a][zr] = acc;
        }
    }
    Ok(out)
}

/// Full restricted differential `d^n_res` in characteristic 2.
pub fn d_res(pair: &ResPair, ctx: &ComplexCtx) -> Result<ResPair, CochainError> {
    if pair.n == 1 {
        Ok(ResPair::pair(d_ce(&pair.phi, ctx), delta1(&pair.phi, ctx)?))
    } else {
        Ok(ResPair::pair(d_ce(&pair.phi, ctx), delta_n(pair, ctx)?))
    }
}

/// Everything needed to run the morphism and Lie-Rinehart complexes of one
/// bundle: the derivation algebra with its canonical basis and the three
/// evaluation contexts.
#[derive(Debug, Clone)]
pub struct Complexes {
    pub r: RlrAlgebra,
    pub der: DerSpace,
    pub der_lie: LiePresentation,
    pub ctx_ll: ComplexCtx,
    pub ctx_mm: ComplexCtx,
    pub ctx_lm: ComplexCtx,
    /// `rho(x_j)` in derivation coordinates, per `L`-basis index.
    pub rho_coords: Vec<Vec<u32>>,
}

impl Complexes {
    pub fn new(r: &RlrAlgebra) -> Self {
        let der = compute_derivations(&r.a);
        let der_lie = der
            .lie_presentation()
            .expect("Der(A) closed under bracket and p-th power");
        let ctx_ll = ComplexCtx::adjoint(&r.l);
        let ctx_mm = ComplexCtx::adjoint(&der_lie);
        let rho_coords: Vec<Vec<u32>> = (0..r.l.dim)
            .map(|j| der.coords(&r.anchor[j]).expect("anchor values are derivations"))
            .collect();
        let act_lm = (0..r.l.dim)
            .map(|j| {
                // D -> [rho(x_j), D] in derivation coordinates
                let mut m = MatGfp::zeros(der.dim(), der.dim(), r.p());
                for (c, dmat) in der.mats.iter().enumerate() {
                    let com = r.anchor[j].commutator(dmat);
                    let coords = der.coords(&com).expect("Der(A) closed under bracket");
                    for (row, &v) in coords.iter().enumerate() {
                        m.set(row, c, v);
                    }
                }
                m
            })
            .collect();
        let ctx_lm = ComplexCtx {
            src: r.l.clone(),
            val_dim: der.dim(),
            act: act_lm,
        };
        Complexes {
            r: r.clone(),
            der,
            der_lie,
            ctx_ll,
            ctx_mm,
            ctx_lm,
            rho_coords,
        }
    }

    pub fn p(&self) -> u32 {
        self.r.p().get()
    }

    pub fn dim_l(&self) -> usize {
        self.r.l.dim
    }

    pub fn dim_der(&self) -> usize {
        self.der.dim()
    }

    /// `rho` of an arbitrary `L`-coordinate vector, in derivation coords.
    pub fn rho_of(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p();
        let mut out = vec_ops::zero(self.dim_der());
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                vec_ops::add_assign(&mut out, &vec_ops::scale(c, &self.rho_coords[j], p), p);
            }
        }
        out
    }

    fn compose_rho_alt(&self, phi: &AltForm) -> AltForm {
        AltForm {
            k: phi.k,
            src_dim: phi.src_dim,
            val_dim: self.dim_der(),
            table: phi.table.iter().map(|v| self.rho_of(v)).collect(),
        }
    }

    fn compose_rho_omega(&self, om: &OmegaTable) -> OmegaTable {
        OmegaTable {
            n: om.n,
            src_dim: om.src_dim,
            val_dim: self.dim_der(),
            table: om
                .table
                .iter()
                .map(|zrow| zrow.iter().map(|v| self.rho_of(v)).collect())
                .collect(),
        }
    }

    fn pullback_alt(&self, nu: &AltForm) -> AltForm {
        let p = self.p();
        let dim = self.dim_l();
        let clist = combos(dim, nu.k);
        let mut out = AltForm::zero(nu.k, dim, nu.val_dim);
        for (r, combo) in clist.iter().enumerate() {
            let imgs: Vec<Vec<u32>> = combo.iter().map(|&c| self.rho_coords[c].clone()).collect();
            let args: Vec<&[u32]> = imgs.iter().map(|v| v.as_slice()).collect();
            out.table[r] = nu.eval(&args, p);
        }
        out
    }

    /// `(a; Z) -> epsilon(rho(e_a); rho(Z))` with polarized evaluation.
    fn pullback_omega(&self, second: &ResPair) -> Result<OmegaTable, CochainError> {
        let p = self.p();
        let dim = self.dim_l();
        let n = second.n;
        let zlist = combos(dim, n - 2);
        let mut out = OmegaTable::zero(n, dim, second.phi.val_dim);
        for a in 0..dim {
            for (zr, zcombo) in zlist.iter().enumerate() {
                let imgs: Vec<Vec<u32>> = zcombo.iter().map(|&z| self.rho_coords[z].clone()).collect();
                let zargs: Vec<&[u32]> = imgs.iter().map(|v| v.as_slice()).collect();
                out.table[a][zr] = second.eval_omega(&self.rho_coords[a], &zargs, p)?;
            }
        }
        Ok(out)
    }
}

/// Third component of a morphism cochain, by degree: a constant derivation
/// (degree 1), a linear map `L -> Der(A)` (degree 2), or a restricted pair
/// of degree `n - 1` (degree >= 3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Third {
    Const(Vec<u32>),
    Map(AltForm),
    Pair(ResPair),
}

/// A cochain of the morphism complex:
/// `C^n(L;L) x C^n(Der A; Der A) x C^{n-1}(L; Der A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphCochain {
    pub n: usize,
    pub first: ResPair,
    pub second: ResPair,
    pub third: Third,
}

impl MorphCochain {
    pub fn zero(cx: &Complexes, n: usize) -> Self {
        let third = match n {
            1 => Third::Const(vec_ops::zero(cx.dim_der())),
            2 => Third::Map(AltForm::zero(1, cx.dim_l(), cx.dim_der())),
            _ => Third::Pair(ResPair::zero(n - 1, cx.dim_l(), cx.dim_der())),
        };
        MorphCochain {
            n,
            first: ResPair::zero(n, cx.dim_l(), cx.dim_l()),
            second: ResPair::zero(n, cx.dim_der(), cx.dim_der()),
            third,
        }
    }

    pub fn is_zero(&self) -> bool {
        let third_zero = match &self.third {
            Third::Const(v) => vec_ops::is_zero(v),
            Third::Map(m) => m.is_zero(),
            Third::Pair(pr) => pr.is_zero(),
        };
        self.first.is_zero() && self.second.is_zero() && third_zero
    }
}

/// `alpha_{mu,nu}` of the morphism complex in characteristic 2:
/// `rho o mu + nu o rho^(x)n + d_CE(theta-part)`.
pub fn alpha(cx: &Complexes, first_phi: &AltForm, second_phi: &AltForm, third: &Third) -> AltForm {
    let p = cx.p();
    let a = cx.compose_rho_alt(first_phi);
    let b = cx.pullback_alt(second_phi);
    let c = match third {
        Third::Const(m) => {
            // d^0_CE m: x -> x . m
            let mut out = AltForm::zero(1, cx.dim_l(), cx.dim_der());
            for j in 0..cx.dim_l() {
                out.table[j] = cx.ctx_lm.act[j].mul_vec(m);
            }
            out
        }
        Third::Map(t) => d_ce(t, &cx.ctx_lm),
        Third::Pair(pr) => d_ce(&pr.phi, &cx.ctx_lm),
    };
    a.add(&b, p).add(&c, p)
}

/// `beta_{omega,epsilon}` of the morphism complex in characteristic 2:
/// `rho o omega + epsilon o rho^(x)(n-1) + delta^{n-1}(gamma-part)`.
pub fn beta(
    cx: &Complexes,
    first: &ResPair,
    second: &ResPair,
    third: &Third,
) -> Result<OmegaTable, CochainError> {
    let p = cx.p();
    let a = cx.compose_rho_omega(first.omega.as_ref().expect("beta needs degree >= 2"));
    let b = cx.pullback_omega(second)?;
    let c = match third {
        Third::Map(t) => delta1(t, &cx.ctx_lm)?,
        Third::Pair(pr) => delta_n(pr, &cx.ctx_lm)?,
        Third::Const(_) => return Err(CochainError::Shape("beta undefined at degree 1".into())),
    };
    Ok(a.add(&b, p).add(&c, p))
}

/// Morphism-complex differential in characteristic 2. Degree 1 maps
/// `(mu, nu, m)` to `((d mu, delta^1 mu), (d nu, delta^1 nu), alpha(m))`;
/// higher degrees also produce the `(alpha, beta)` pair in the third slot.
/// In the degree-2 display the second beta subscript is read as the omega
/// parts `(omega, epsilon)`, matching the higher-degree case.
pub fn fd_res(cx: &Complexes, mc: &MorphCochain) -> Result<MorphCochain, CochainError> {
    let first = d_res(&mc.first, &cx.ctx_ll)?;
    let second = d_res(&mc.second, &cx.ctx_mm)?;
    let third = match mc.n {
        1 => Third::Map(alpha(cx, &mc.first.phi, &mc.second.phi, &mc.third)),
        _ => {
            let a = alpha(cx, &mc.first.phi, &mc.second.phi, &mc.third);
            let b = beta(cx, &mc.first, &mc.second, &mc.third)?;
            Third::Pair(ResPair::pair(a, b))
        }
    };
    Ok(MorphCochain {
        n: mc.n + 1,
        first,
        second,
        third,
    })
}

/// A Lie-Rinehart cochain: the middle-zero part of the morphism complex
/// with the compatibility decorations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LrCochain {
    /// degree 1: `(mu, d)` with `mu(ax) = a mu(x) + d(a) x`
    D1 { mu: AltForm, d: Vec<u32> },
    /// degree 2: `(mu, omega, theta)`
    D2 {
        mu: AltForm,
        omega: OmegaTable,
        theta: AltForm,
    },
    /// degree >= 3: `(mu, omega, theta, gamma)`
    Dn {
        mu: AltForm,
        omega: OmegaTable,
        theta: AltForm,
        gamma: OmegaTable,
    },
}

impl LrCochain {
    pub fn degree(&self) -> usize {
        match self {
            LrCochain::D1 { .. } => 1,
            LrCochain::D2 { .. } => 2,
            LrCochain::Dn { mu, .. } => mu.k,
        }
    }

    pub fn zero(cx: &Complexes, n: usize) -> Self {
        match n {
            1 => LrCochain::D1 {
                mu: AltForm::zero(1, cx.dim_l(), cx.dim_l()),
                d: vec_ops::zero(cx.dim_der()),
            },
            2 => LrCochain::D2 {
                mu: AltForm::zero(2, cx.dim_l(), cx.dim_l()),
                omega: OmegaTable::zero(2, cx.dim_l(), cx.dim_l()),
                theta: AltForm::zero(1, cx.dim_l(), cx.dim_der()),
            },
            _ => LrCochain::Dn {
                mu: AltForm::zero(n, cx.dim_l(), cx.dim_l()),
                omega: OmegaTable::zero(n, cx.dim_l(), cx.dim_l()),
                theta: AltForm::zero(n - 1, cx.dim_l(), cx.dim_der()),
                gamma: OmegaTable::zero(n - 1, cx.dim_l(), cx.dim_der()),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LrCochain::D1 { mu, d } => mu.is_zero() && vec_ops::is_zero(d),
            LrCochain::D2 { mu, omega, theta } => mu.is_zero() && omega.is_zero() && theta.is_zero(),
            LrCochain::Dn { mu, omega, theta, gamma } => {
                mu.is_zero() && omega.is_zero() && theta.is_zero() && gamma.is_zero()
            }
        }
    }

    pub fn add(&self, rhs: &LrCochain, p: u32) -> LrCochain {
        match (self, rhs) {
            (LrCochain::D1 { mu: m1, d: d1 }, LrCochain::D1 { mu: m2, d: d2 }) => LrCochain::D1 {
                mu: m1.add(m2, p),
                d: vec_ops::add(d1, d2, p),
            },
            (
                LrCochain::D2 { mu: m1, omega: o1, theta: t1 },
                LrCochain::D2 { mu: m2, omega: o2, theta: t2 },
            ) => LrCochain::D2 {
                mu: m1.add(m2, p),
                omega: o1.add(o2, p),
                theta: t1.add(t2, p),
            },
            (
                LrCochain::Dn { mu: m1, omega: o1, theta: t1, gamma: g1 },
                LrCochain::Dn { mu: m2, omega: o2, theta: t2, gamma: g2 },
            ) => LrCochain::Dn {
                mu: m1.add(m2, p),
                omega: o1.add(o2, p),
                theta: t1.add(t2, p),
                gamma: g1.add(g2, p),
            },
            _ => panic!("degree mismatch"),
        }
    }
}

/// Embedding into the morphism complex: middle component zero.
pub fn lr_embed(cx: &Complexes, c: &LrCochain) -> MorphCochain {
    let n = c.degree();
    match c {
        LrCochain::D1 { mu, d } => MorphCochain {
            n,
            first: ResPair::linear(mu.clone()),
            second: ResPair::zero(1, cx.dim_der(), cx.dim_der()),
            third: Third::Const(d.clone()),
        },
        LrCochain::D2 { mu, omega, theta } => MorphCochain {
            n,
            first: ResPair::pair(mu.clone(), omega.clone()),
            second: ResPair::zero(2, cx.dim_der(), cx.dim_der()),
            third: Third::Map(theta.clone()),
        },
        LrCochain::Dn { mu, omega, theta, gamma } => MorphCochain {
            n,
            first: ResPair::pair(mu.clone(), omega.clone()),
            second: ResPair::zero(n, cx.dim_der(), cx.dim_der()),
            third: Third::Pair(ResPair::pair(theta.clone(), gamma.clone())),
        },
    }
}

/// Left inverse of the embedding. Rejects a nonzero middle component or a
/// third component of the wrong shape, then validates the Lie-Rinehart
/// constraints and reports which one fails.
pub fn lr_project(cx: &Complexes, mc: &MorphCochain) -> Result<LrCochain, CochainError> {
    if !mc.second.is_zero() {
        return Err(CochainError::Projection("middle component is nonzero".into()));
    }
    let candidate = match (mc.n, &mc.third) {
        (1, Third::Const(d)) => LrCochain::D1 {
            mu: mc.first.phi.clone(),
            d: d.clone(),
        },
        (2, Third::Map(t)) => LrCochain::D2 {
            mu: mc.first.phi.clone(),
            omega: mc
                .first
                .omega
                .clone()
                .ok_or_else(|| CochainError::Shape("missing omega".into()))?,
            theta: t.clone(),
        },
        (n, Third::Pair(pr)) if n >= 3 => LrCochain::Dn {
            mu: mc.first.phi.clone(),
            omega: mc
                .first
                .omega
                .clone()
                .ok_or_else(|| CochainError::Shape("missing omega".into()))?,
            theta: pr.phi.clone(),
            gamma: pr
                .omega
                .clone()
                .ok_or_else(|| CochainError::Shape("missing gamma".into()))?,
        },
        _ => {
            return Err(CochainError::Projection(
                "third component shape does not match degree".into(),
            ))
        }
    };
    let rep = validate_lr(cx, &candidate);
    if let Some(bad) = rep.checks.iter().find(|c| !c.passed()) {
        return Err(CochainError::Projection(format!(
            "constraint {} fails at {}",
            bad.name,
            bad.witness.clone().unwrap_or_default()
        )));
    }
    Ok(candidate)
}

/// Validate every Lie-Rinehart constraint of a cochain, one report per
/// constraint. Multilinear constraints run on basis tuples; constraints
/// quadratic in a slot are enumerated exhaustively over the carriers
/// (these are desk-scale by construction).
pub fn validate_lr(cx: &Complexes, c: &LrCochain) -> ReportSet {
    let p = cx.p();
    let dim_a = cx.r.a.dim;
    let dim_l = cx.dim_l();
    let mut set = ReportSet::new();
    let a_all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim_a, p).collect();
    let l_all: Vec<Vec<u32>> = vec_ops::enumerate_all(dim_l, p).collect();

    match c {
        LrCochain::D1 { mu, d } => {
            let dmat = cx.der.matrix(d);
            let mut chk = CheckReport::pass("c1_leibniz");
            'd1: for ai in 0..dim_a {
                let ea = vec_ops::unit(dim_a, ai);
                for xi in 0..dim_l {
                    let x = vec_ops::unit(dim_l, xi);
                    let ax = cx.r.action.apply(&ea, &x, p);
                    let lhs = mu.eval(&[&ax], p);
                    let mut rhs = cx.r.action.apply(&ea, &mu.eval(&[&x], p), p);
                    vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&dmat.mul_vec(&ea), &x, p), p);
                    if lhs != rhs {
                        chk = CheckReport::fail("c1_leibniz", format!("a=e{}, x=x{}", ai + 1, xi + 1));
                        break 'd1;
                    }
                }
            }
            set.push(chk);
        }
        LrCochain::D2 { mu, omega, theta } => {
            set.push(check_mu_last_slot(cx, mu, theta, "c2_mu_second_slot"));
            let pair = ResPair::pair(mu.clone(), omega.clone());
            let mut chk = CheckReport::pass("c2_omega_scaling");
            'o2: for a in &a_all {
                for x in &l_all {
                    let ax = cx.r.action.apply(a, x, p);
                    let lhs = pair.eval_omega(&ax, &[], p).expect("arity");
                    let a2 = cx.r.a.product(a, a);
                    let mut rhs = cx.r.action.apply(&a2, &pair.eval_omega(x, &[], p).expect("arity"), p);
                    let th_ax = cx.der.matrix(&theta.eval(&[&ax], p));
                    vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&th_ax.mul_vec(a), x, p), p);
                    if lhs != rhs {
                        chk = CheckReport::fail("c2_omega_scaling", format!("a={a:?}, x={x:?}"));
                        break 'o2;
                    }
                }
            }
            set.push(chk);
            set.push(check_a_linear_alt(cx, theta, "theta_a_linear"));
        }
        LrCochain::Dn { mu, omega, theta, gamma } => {
            let n = mu.k;
            set.push(check_mu_last_slot(cx, mu, theta, "cn_mu_last_slot"));
            let pair = ResPair::pair(mu.clone(), omega.clone());
            let tg = ResPair::pair(theta.clone(), gamma.clone());

            let zlist = combos(dim_l, n - 2);
            let mut chk = CheckReport::pass("cn_omega_first_slot");
            'od: for a in &a_all {
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
                        if lhs != rhs {
                            chk = CheckReport::fail("cn_omega_first_slot", format!("a={a:?}, x={x:?}, Z={zc:?}"));
                            break 'od;
                        }
                    }
                }
            }
            set.push(chk);

            // z-slot scaling: the display's index conventions are read so
            // that the first slot x is retained and the scaled z-slot is
            // paired with gamma evaluated on the remaining z's.
            let mut chk = CheckReport::pass("cn_omega_z_slot");
            'oe: for xi in 0..dim_l {
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
                            if lhs != rhs {
                                chk = CheckReport::fail(
                                    "cn_omega_z_slot",
                                    format!("x=x{}, Z={ztuple:?}, slot={slot}, a=e{}", xi + 1, ai + 1),
                                );
                                break 'oe;
                            }
                        }
                    }
                }
            }
            set.push(chk);

            set.push(check_a_linear_alt(cx, theta, "theta_a_linear"));

            let wlist = combos(dim_l, n.saturating_sub(3));
            let mut chk = CheckReport::pass("gamma_a_linear");
            'g: for a in &a_all {
                for x in &l_all {
                    for wc in &wlist {
                        let wunits: Vec<Vec<u32>> = wc.iter().map(|&w| vec_ops::unit(dim_l, w)).collect();
                        let wargs: Vec<&[u32]> = wunits.iter().map(|w| w.as_slice()).collect();
                        let ax = cx.r.action.apply(a, x, p);
                        let lhs = cx.der.matrix(&tg.eval_omega(&ax, &wargs, p).expect("arity"));
                        let a2 = cx.r.a.product(a, a);
                        let inner = cx.der.matrix(&tg.eval_omega(x, &wargs, p).expect("arity"));
                        let rhs = cx.r.a.mult_operator(&a2).matmul(&inner);
                        if lhs != rhs {
                            chk = CheckReport::fail("gamma_a_linear", format!("first slot: a={a:?}, x={x:?}"));
                            break 'g;
                        }
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
                            if lhs != rhs {
                                chk = CheckReport::fail("gamma_a_linear", format!("z slot {slot}: a={a:?}, x={x:?}"));
                                break 'g;
                            }
                        }
                    }
                }
            }
            set.push(chk);
        }
    }
    set
}

/// `mu(x_1..x_{n-1}, a x_n) = a mu(X) + theta(x_1..x_{n-1})(a) x_n` on all
/// basis tuples.
fn check_mu_last_slot(cx: &Complexes, mu: &AltForm, theta: &AltForm, name: &str) -> CheckReport {
    let p = cx.p();
    let dim_a = cx.r.a.dim;
    let dim_l = cx.dim_l();
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
            vec_ops::add_assign(&mut rhs, &cx.r.action.apply(&th.mul_vec(&ea), &units[n - 1], p), p);
            if lhs != rhs {
                return CheckReport::fail(name, format!("X={tuple:?}, a=e{}", ai + 1));
            }
        }
    }
    CheckReport::pass(name)
}

/// A-linearity of a `Der(A)`-valued alternating form in every slot, on
/// basis tuples.
fn check_a_linear_alt(cx: &Complexes, theta: &AltForm, name: &str) -> CheckReport {
    let p = cx.p();
    let dim_a = cx.r.a.dim;
    let dim_l = cx.dim_l();
    let k = theta.k;
    for tuple in tuples(dim_l, k) {
        let units: Vec<Vec<u32>> = tuple.iter().map(|&i| vec_ops::unit(dim_l, i)).collect();
        for slot in 0..k {
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
                if lhs != rhs {
                    return CheckReport::fail(name, format!("X={tuple:?}, slot={slot}, a=e{}", ai + 1));
                }
            }
        }
    }
    CheckReport::pass(name)
}

/// The Lie-Rinehart differential: embed, differentiate in the morphism
/// complex, project back. The projection validates every constraint of
/// the target degree; a violation would falsify well-definedness of the
/// sub-complex and is surfaced loudly.
pub fn lr_differential(cx: &Complexes, c: &LrCochain) -> Result<LrCochain, CochainError> {
    let image = fd_res(cx, &lr_embed(cx, c))?;
    lr_project(cx, &image).map_err(|e| CochainError::OutputConstraint(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::Prime;
    use crate::registry;

    fn lab0() -> Complexes {
        Complexes::new(&registry::lab0_a4())
    }

    fn rigid() -> Complexes {
        Complexes::new(&registry::rigid_a4())
    }

    fn e_to(cx: &Complexes, image: &[u32]) -> Vec<u32> {
        // derivation sending e2 to `image`, e1 to 0, in canonical coords
        let mut m = MatGfp::zeros(2, 2, Prime::new(2).unwrap());
        for (i, &v) in image.iter().enumerate() {
            m.set(i, 1, v);
        }
        cx.der.coords(&m).expect("a derivation of A4")
    }

    fn mu1(cx: &Complexes) -> AltForm {
        let mut m = AltForm::zero(2, cx.dim_l(), cx.dim_l());
        m.set_entry(&[0, 1], vec![1, 0]);
        m
    }

    fn mu2(cx: &Complexes) -> AltForm {
        let mut m = AltForm::zero(2, cx.dim_l(), cx.dim_l());
        m.set_entry(&[0, 1], vec![0, 1]);
        m
    }

    fn omega(cx: &Complexes, on_x: &[u32], on_y: &[u32]) -> OmegaTable {
        let mut o = OmegaTable::zero(2, cx.dim_l(), cx.dim_l());
        o.table[0][0] = on_x.to_vec();
        o.table[1][0] = on_y.to_vec();
        o
    }

    fn theta1(cx: &Complexes) -> AltForm {
        let mut t = AltForm::zero(1, cx.dim_l(), cx.dim_der());
        t.table[0] = e_to(cx, &[1, 0]);
        t.table[1] = e_to(cx, &[0, 1]);
        t
    }

    #[test]
    fn eval_omega_fixtures() {
        let cx = lab0();
        // the catalogue cocycle (mu1, omega4)
        let pair = ResPair::pair(mu1(&cx), omega(&cx, &[0, 0], &[0, 1]));
        // omega(0) = 0
        assert_eq!(pair.eval_omega(&[0, 0], &[], 2).unwrap(), vec![0, 0]);
        // omega(lambda x) = lambda^2 omega(x): over GF(2) only lambda = 1
        assert_eq!(pair.eval_omega(&[0, 1], &[], 2).unwrap(), vec![0, 1]);
        // omega4(x + y) = omega4(x) + omega4(y) + mu1(x, y) = y + x
        assert_eq!(pair.eval_omega(&[1, 1], &[], 2).unwrap(), vec![1, 1]);
        // arity mismatch is rejected
        let z = [1u32, 0];
        assert!(matches!(
            pair.eval_omega(&[1, 0], &[&z], 2),
            Err(CochainError::Arity { expected: 0, got: 1 })
        ));
    }

    #[test]
    fn eval_omega_polarization_consistent() {
        // omega(u + v, Z) = omega(u, Z) + omega(v, Z) + phi(u, v, Z),
        // exhaustively over GF(2) arguments, degrees 2 and 3.
        for cx in [rigid(), lab0()] {
            let p = cx.p();
            for n in 2..=3usize {
                let mut pair = ResPair::zero(n, cx.dim_l(), cx.dim_l());
                // an arbitrary nonzero fixture
                for (r, row) in pair.phi.table.iter_mut().enumerate() {
                    row[0] = ((r + 1) % 2) as u32;
                    row[1] = 1;
                }
                if let Some(om) = pair.omega.as_mut() {
                    for (i, zrow) in om.table.iter_mut().enumerate() {
                        for (zr, v) in zrow.iter_mut().enumerate() {
                            v[0] = ((i + zr) % 2) as u32;
                            v[1] = (i % 2) as u32;
                        }
                    }
                }
                let zlists = tuples(cx.dim_l(), n - 2);
                for u in vec_ops::enumerate_all(cx.dim_l(), p) {
                    for v in vec_ops::enumerate_all(cx.dim_l(), p) {
                        for zt in &zlists {
                            let zunits: Vec<Vec<u32>> =
                                zt.iter().map(|&i| vec_ops::unit(cx.dim_l(), i)).collect();
                            let zargs: Vec<&[u32]> = zunits.iter().map(|z| z.as_slice()).collect();
                            let sum = vec_ops::add(&u, &v, p);
                            let lhs = pair.eval_omega(&sum, &zargs, p).unwrap();
                            let mut rhs = pair.eval_omega(&u, &zargs, p).unwrap();
                            vec_ops::add_assign(&mut rhs, &pair.eval_omega(&v, &zargs, p).unwrap(), p);
                            let mut args: Vec<&[u32]> = vec![&u, &v];
                            args.extend(zargs.iter());
                            vec_ops::add_assign(&mut rhs, &pair.phi.eval(&args, p), p);
                            assert_eq!(lhs, rhs, "n={n}, u={u:?}, v={v:?}, Z={zt:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn d_ce_fixtures() {
        let cx = rigid();
        // d^1(id)(x, y) = id[x,y] - [x, id y] - [id x, y] = -[x,y] = [x,y] over GF(2)
        let id = AltForm {
            k: 1,
            src_dim: 2,
            val_dim: 2,
            table: vec![vec![1, 0], vec![0, 1]],
        };
        let d = d_ce(&id, &cx.ctx_ll);
        assert_eq!(d.entry(&[0, 1]), &[0, 1], "[x,y] = y");

        // on an abelian algebra with trivial action every d vanishes
        let cx0 = lab0();
        let d0 = d_ce(&mu1(&cx0), &cx0.ctx_ll);
        assert!(d0.is_zero());
    }

    #[test]
    fn d_ce_squares_to_zero_on_random_cochains() {
        let cx = rigid();
        for seed in 0..50u32 {
            let mut phi = AltForm::zero(1, 2, 2);
            phi.table[0] = vec![seed & 1, (seed >> 1) & 1];
            phi.table[1] = vec![(seed >> 2) & 1, (seed >> 3) & 1];
            let dd = d_ce(&d_ce(&phi, &cx.ctx_ll), &cx.ctx_ll);
            assert!(dd.is_zero(), "seed {seed}");
        }
    }

    #[test]
    fn delta1_fixtures() {
        let cx = rigid();
        let id = AltForm {
            k: 1,
            src_dim: 2,
            val_dim: 2,
            table: vec![vec![1, 0], vec![0, 1]],
        };
        // delta^1(id)(x) = id(x^[2]) + [x, x] = x^[2]
        let d = delta1(&id, &cx.ctx_ll).unwrap();
        assert_eq!(d.table[0][0], vec![1, 0]);
        assert_eq!(d.table[1][0], vec![0, 0]);

        // zero p-map and abelian bracket force delta^1 = 0
        let cx0 = lab0();
        for t in 0..16u32 {
            let phi = AltForm {
                k: 1,
                src_dim: 2,
                val_dim: 2,
                table: vec![vec![t & 1, (t >> 1) & 1], vec![(t >> 2) & 1, (t >> 3) & 1]],
            };
            assert!(delta1(&phi, &cx0.ctx_ll).unwrap().is_zero());
        }
    }

    #[test]
    fn delta2_of_reference_cocycle_vanishes_on_lab0() {
        let cx = lab0();
        let pair = ResPair::pair(mu1(&cx), omega(&cx, &[0, 0], &[0, 1]));
        let d = delta_n(&pair, &cx.ctx_ll).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn delta_rejects_odd_characteristic() {
        let cx = Complexes::new(&registry::toy_t3_p3());
        let phi = AltForm::zero(1, 2, 2);
        assert!(matches!(
            delta1(&phi, &cx.ctx_ll),
            Err(CochainError::WrongCharacteristic(3))
        ));
    }

    #[test]
    fn res_differential_squares_to_zero() {
        // d^{n+1}_res o d^n_res = 0 on dense fixtures, all three contexts.
        for cx in [rigid(), lab0()] {
            for ctx in [&cx.ctx_ll, &cx.ctx_mm, &cx.ctx_lm] {
                for seed in 0..20u32 {
                    let mut phi = AltForm::zero(1, ctx.src.dim, ctx.val_dim);
                    for (r, row) in phi.table.iter_mut().enumerate() {
                        for (c, v) in row.iter_mut().enumerate() {
                            *v = (seed >> ((r + c) % 8)) & 1;
                        }
                    }
                    let once = d_res(&ResPair::linear(phi), ctx).unwrap();
                    let twice = d_res(&once, ctx).unwrap();
                    assert!(twice.is_zero(), "degree 1, seed {seed}");
                    let thrice = d_res(&d_res(&twice, ctx).unwrap(), ctx).unwrap();
                    assert!(thrice.is_zero());
                }
            }
        }
    }

    #[test]
    fn alpha_beta_fixtures() {
        let cx = lab0();
        // mu = nu = theta = 0 gives alpha = beta = 0
        let z2 = MorphCochain::zero(&cx, 2);
        let a = alpha(&cx, &z2.first.phi, &z2.second.phi, &z2.third);
        assert!(a.is_zero());
        let b = beta(&cx, &z2.first, &z2.second, &z2.third).unwrap();
        assert!(b.is_zero());

        // catalogue: alpha_{mu1,0}(theta1) = 0 and beta_{omega4,0}(theta1) = 0
        let first = ResPair::pair(mu1(&cx), omega(&cx, &[0, 0], &[0, 1]));
        let second = ResPair::zero(2, cx.dim_der(), cx.dim_der());
        let third = Third::Map(theta1(&cx));
        assert!(alpha(&cx, &first.phi, &second.phi, &third).is_zero());
        assert!(beta(&cx, &first, &second, &third).unwrap().is_zero());
    }

    #[test]
    fn alpha_of_bracket_is_exact_on_rigid() {
        // alpha_{mu0,0}(0) = rho o mu0 equals d_CE of x -> rho(x)
        let cx = rigid();
        let mut mu0 = AltForm::zero(2, 2, 2);
        mu0.set_entry(&[0, 1], cx.r.l.bracket_vec(&[1, 0], &[0, 1]));
        let second = AltForm::zero(2, cx.dim_der(), cx.dim_der());
        let third = Third::Map(AltForm::zero(1, 2, cx.dim_der()));
        let a = alpha(&cx, &mu0, &second, &third);
        let rho_cochain = AltForm {
            k: 1,
            src_dim: 2,
            val_dim: cx.dim_der(),
            table: cx.rho_coords.clone(),
        };
        assert_eq!(a, d_ce(&rho_cochain, &cx.ctx_lm));
    }

    #[test]
    fn fd_res_degree1_third_component() {
        // third of fd^1(mu, 0, d) at x is rho(mu(x)) + [rho(x), d]
        let cx = rigid();
        for seed in 0..16u32 {
            let mu = AltForm {
                k: 1,
                src_dim: 2,
                val_dim: 2,
                table: vec![vec![seed & 1, (seed >> 1) & 1], vec![(seed >> 2) & 1, (seed >> 3) & 1]],
            };
            let d = vec![seed & 1, (seed >> 1) & 1];
            let mc = MorphCochain {
                n: 1,
                first: ResPair::linear(mu.clone()),
                second: ResPair::zero(1, cx.dim_der(), cx.dim_der()),
                third: Third::Const(d.clone()),
            };
            let out = fd_res(&cx, &mc).unwrap();
            let Third::Map(am) = &out.third else { panic!("shape") };
            for j in 0..2 {
                let x = vec_ops::unit(2, j);
                let mut expect = cx.rho_of(&mu.eval(&[&x], 2));
                vec_ops::add_assign(&mut expect, &cx.ctx_lm.act[j].mul_vec(&d), 2);
                assert_eq!(am.eval(&[&x], 2), expect);
            }
        }
    }

    #[test]
    fn fd_res_zero_and_composition() {
        for cx in [rigid(), lab0()] {
            for n in 1..=3usize {
                let z = MorphCochain::zero(&cx, n);
                assert!(fd_res(&cx, &z).unwrap().is_zero());
            }
            // fd^{n+1} o fd^n = 0 on dense cochains
            for seed in 0..50u32 {
                let mut mc = MorphCochain::zero(&cx, 1);
                mc.first.phi.table[0] = vec![seed & 1, (seed >> 1) & 1];
                mc.first.phi.table[1] = vec![(seed >> 2) & 1, (seed >> 3) & 1];
                mc.second.phi.table[0] = vec![(seed >> 4) & 1, (seed >> 5) & 1];
                if let Third::Const(m) = &mut mc.third {
                    m[0] = (seed >> 6) & 1;
                    m[1] = (seed >> 7) & 1;
                }
                let one = fd_res(&cx, &mc).unwrap();
                let two = fd_res(&cx, &one).unwrap();
                assert!(two.is_zero(), "fd^2 fd^1 at seed {seed}");
                let three = fd_res(&cx, &two).unwrap();
                let four = fd_res(&cx, &three).unwrap();
                assert!(four.is_zero());
            }
        }
    }

    #[test]
    fn lr_embed_project_round_trip() {
        let cx = lab0();
        let c = LrCochain::D2 {
            mu: mu1(&cx),
            omega: omega(&cx, &[0, 0], &[0, 1]),
            theta: theta1(&cx),
        };
        let emb = lr_embed(&cx, &c);
        assert!(emb.second.is_zero());
        let back = lr_project(&cx, &emb).unwrap();
        assert_eq!(back, c);

        // nonzero middle component is rejected
        let mut bad = emb.clone();
        bad.second.phi.table[0] = vec![1, 0];
        assert!(matches!(lr_project(&cx, &bad), Err(CochainError::Projection(_))));
    }

    #[test]
    fn lr_differential_fixtures() {
        let cx = lab0();
        // zero maps to zero
        for n in 1..=3usize {
            let z = LrCochain::zero(&cx, n);
            assert!(lr_differential(&cx, &z).unwrap().is_zero());
        }
        // degree-1 differential vanishes identically on this bundle
        for raw in vec_ops::enumerate_all(6, 2) {
            let mu = AltForm {
                k: 1,
                src_dim: 2,
                val_dim: 2,
                table: vec![vec![raw[0], raw[1]], vec![raw[2], raw[3]]],
            };
            let d = vec![raw[4], raw[5]];
            let c = LrCochain::D1 { mu: mu.clone(), d: d.clone() };
            if !validate_lr(&cx, &c).all_passed() {
                continue;
            }
            assert!(lr_differential(&cx, &c).unwrap().is_zero());
        }
    }

    #[test]
    fn lr_differential_squares_to_zero_and_commutes_with_embed() {
        for cx in [rigid(), lab0()] {
            for raw in vec_ops::enumerate_all(6, 2) {
                let mu = AltForm {
                    k: 1,
                    src_dim: 2,
                    val_dim: 2,
                    table: vec![vec![raw[0], raw[1]], vec![raw[2], raw[3]]],
                };
                let d = vec![raw[4], raw[5]];
                let c = LrCochain::D1 { mu, d };
                if !validate_lr(&cx, &c).all_passed() {
                    continue;
                }
                let d1 = lr_differential(&cx, &c).unwrap();
                // embed(d(c)) = fd(embed(c)) -- the sub-complex property
                assert_eq!(lr_embed(&cx, &d1), fd_res(&cx, &lr_embed(&cx, &c)).unwrap());
                let d2 = lr_differential(&cx, &d1).unwrap();
                assert!(d2.is_zero());
                let d3 = lr_differential(&cx, &d2).unwrap();
                let d4 = lr_differential(&cx, &d3).unwrap();
                assert!(d4.is_zero());
            }
        }
    }

    #[test]
    fn lr_addition_preserves_constraints() {
        let cx = rigid();
        let mut valid = Vec::new();
        for raw in vec_ops::enumerate_all(6, 2) {
            let mu = AltForm {
                k: 1,
                src_dim: 2,
                val_dim: 2,
                table: vec![vec![raw[0], raw[1]], vec![raw[2], raw[3]]],
            };
            let c = LrCochain::D1 { mu, d: vec![raw[4], raw[5]] };
            if validate_lr(&cx, &c).all_passed() {
                valid.push(c);
            }
        }
        for a in &valid {
            for b in &valid {
                assert!(validate_lr(&cx, &a.add(b, 2)).all_passed());
            }
        }
    }
}
