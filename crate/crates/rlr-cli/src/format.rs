//! The algebra-definition file format: a JSON document with explicit
//! sparse tables (`[i, j, k, value]` triples) so basis order is never
//! ambiguous. Sections beyond the characteristic are optional; each
//! command states which sections it needs.

use rlr_core::algebra::{AlgebraPresentation, LiePresentation, ModuleAction, RlrAlgebra};
use rlr_core::cochain::{AltForm, Complexes, LrCochain, OmegaTable};
use rlr_core::cohomology::{point_rank, PCochain2};
use rlr_core::gfp::{MatGfp, Prime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

fn neg_res(v: u32, p: u32) -> u32 {
    let r = v % p;
    if r == 0 { 0 } else { p - r }
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// Sparse entry `[i, j, k, value]`.
pub type Triple = (usize, usize, usize, u32);

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraSection {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub basis: Vec<String>,
    #[serde(default)]
    pub products: Vec<Triple>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LieSection {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<Triple>,
    /// One coordinate row per basis vector: the image of `e_j` under the
    /// p-map (or the proposed image, for the extension command).
    pub pmap: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CochainSection {
    #[serde(default)]
    pub mu: Vec<Triple>,
    /// Characteristic 2: one value row per `L`-basis vector.
    #[serde(default)]
    pub omega_basis: Option<Vec<Vec<u32>>>,
    /// p >= 3: the full point table.
    #[serde(default)]
    pub omega_table: Option<Vec<OmegaPoint>>,
    /// One matrix (rows of `dim A` entries) per `L`-basis vector.
    #[serde(default)]
    pub theta: Option<Vec<Vec<Vec<u32>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OmegaPoint {
    pub point: Vec<u32>,
    pub value: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DeformationSection {
    /// Coefficient triples at `t^1, t^2, ...` in order.
    pub coefficients: Vec<CochainSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CandidateSection {
    /// Square matrix on `L`, given as rows.
    pub gamma: Vec<Vec<u32>>,
    /// Derivation matrix on `A`, given as rows.
    pub d: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AutomorphismSection {
    /// `phi_1, phi_2, ...` as row-major matrices on `L` (`phi_0 = id` is
    /// implicit).
    pub phi: Vec<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraFile {
    pub characteristic: u32,
    #[serde(default)]
    pub algebra: Option<AlgebraSection>,
    #[serde(default)]
    pub lie: Option<LieSection>,
    /// Action triples `[a, j, k, v]`: `e_a . x_j = sum v x_k`.
    #[serde(default)]
    pub action: Option<Vec<Triple>>,
    /// One `dim A x dim A` matrix (rows) per `L`-basis vector.
    #[serde(default)]
    pub anchor: Option<Vec<Vec<Vec<u32>>>>,
    #[serde(default)]
    pub cochain: Option<CochainSection>,
    #[serde(default)]
    pub deformation: Option<DeformationSection>,
    #[serde(default)]
    pub candidate: Option<CandidateSection>,
    #[serde(default)]
    pub automorphism: Option<AutomorphismSection>,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn serialize(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn prime(&self) -> Result<Prime, FormatError> {
        Prime::new(self.characteristic).map_err(|e| invalid(e.to_string()))
    }

    fn validate(&self) -> Result<(), FormatError> {
        let p = self.prime()?.get();
        let check_residue = |v: u32, what: &str| {
            if v >= p {
                Err(invalid(format!("{what}: value {v} is not a residue mod {p}")))
            } else {
                Ok(())
            }
        };
        if let Some(a) = &self.algebra {
            if a.basis.len() != a.dim {
                return Err(invalid("algebra: basis label count differs from dim"));
            }
            for &(i, j, k, v) in &a.products {
                if i >= a.dim || j >= a.dim || k >= a.dim {
                    return Err(invalid(format!("algebra.products: index out of range in [{i},{j},{k},{v}]")));
                }
                check_residue(v, "algebra.products")?;
            }
        }
        if let Some(l) = &self.lie {
            if l.basis.len() != l.dim {
                return Err(invalid("lie: basis label count differs from dim"));
            }
            for &(i, j, k, v) in &l.brackets {
                if i >= l.dim || j >= l.dim || k >= l.dim {
                    return Err(invalid(format!("lie.brackets: index out of range in [{i},{j},{k},{v}]")));
                }
                check_residue(v, "lie.brackets")?;
            }
            if l.pmap.len() != l.dim {
                return Err(invalid("lie.pmap: one row per basis vector required"));
            }
            for row in &l.pmap {
                if row.len() != l.dim {
                    return Err(invalid("lie.pmap: row length differs from dim"));
                }
                for &v in row {
                    check_residue(v, "lie.pmap")?;
                }
            }
        }
        if let Some(action) = &self.action {
            let (da, dl) = match (&self.algebra, &self.lie) {
                (Some(a), Some(l)) => (a.dim, l.dim),
                _ => return Err(invalid("action requires both algebra and lie sections")),
            };
            for &(a, j, k, v) in action {
                if a >= da || j >= dl || k >= dl {
                    return Err(invalid(format!("action: index out of range in [{a},{j},{k},{v}]")));
                }
                check_residue(v, "action")?;
            }
        }
        if let Some(anchor) = &self.anchor {
            let (da, dl) = match (&self.algebra, &self.lie) {
                (Some(a), Some(l)) => (a.dim, l.dim),
                _ => return Err(invalid("anchor requires both algebra and lie sections")),
            };
            if anchor.len() != dl {
                return Err(invalid("anchor: one matrix per lie basis vector required"));
            }
            for m in anchor {
                if m.len() != da || m.iter().any(|row| row.len() != da) {
                    return Err(invalid("anchor: matrices must be dim A x dim A"));
                }
                for row in m {
                    for &v in row {
                        check_residue(v, "anchor")?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra_presentation(&self) -> Result<AlgebraPresentation, FormatError> {
        let p = self.prime()?;
        let a = self.algebra.as_ref().ok_or_else(|| invalid("missing algebra section"))?;
        Ok(AlgebraPresentation::new(
            a.name.clone().unwrap_or_else(|| "A".into()),
            p,
            a.basis.clone(),
            &a.products,
        ))
    }

    pub fn lie_presentation(&self) -> Result<LiePresentation, FormatError> {
        let p = self.prime()?;
        let l = self.lie.as_ref().ok_or_else(|| invalid("missing lie section"))?;
        Ok(LiePresentation::new(
            l.name.clone().unwrap_or_else(|| "L".into()),
            p,
            l.basis.clone(),
            &l.brackets,
            l.pmap.clone(),
        ))
    }

    pub fn bundle(&self) -> Result<RlrAlgebra, FormatError> {
        let p = self.prime()?;
        let a = self.algebra_presentation()?;
        let l = self.lie_presentation()?;
        let action = self
            .action
            .as_ref()
            .ok_or_else(|| invalid("missing action section"))?;
        let anchor = self
            .anchor
            .as_ref()
            .ok_or_else(|| invalid("missing anchor section"))?;
        let anchor_mats = anchor
            .iter()
            .map(|rows| MatGfp::from_rows(rows.clone(), a.dim, p))
            .collect();
        Ok(RlrAlgebra {
            name: "input".into(),
            a: a.clone(),
            l,
            action: ModuleAction::new(a.dim, self.lie.as_ref().unwrap().dim, action),
            anchor: anchor_mats,
        })
    }

    /// The cochain section as a characteristic-2 degree-2 cochain.
    pub fn lr_cochain(&self, cx: &Complexes) -> Result<LrCochain, FormatError> {
        let section = self.cochain.as_ref().ok_or_else(|| invalid("missing cochain section"))?;
        section_to_lr(section, cx)
    }

    /// The cochain section as a p >= 3 degree-2 triple.
    pub fn p_cochain(&self, cx: &Complexes) -> Result<PCochain2, FormatError> {
        let section = self.cochain.as_ref().ok_or_else(|| invalid("missing cochain section"))?;
        section_to_p(section, cx)
    }
}

fn theta_form(cx: &Complexes, mats: &Option<Vec<Vec<Vec<u32>>>>) -> Result<AltForm, FormatError> {
    let dim_l = cx.dim_l();
    let mut theta = AltForm::zero(1, dim_l, cx.dim_der());
    if let Some(rows) = mats {
        if rows.len() != dim_l {
            return Err(invalid("cochain.theta: one matrix per lie basis vector"));
        }
        for (j, m) in rows.iter().enumerate() {
            let da = cx.r.a.dim;
            if m.len() != da || m.iter().any(|row| row.len() != da) {
                return Err(invalid(format!("cochain.theta[{j}]: expected a {da}x{da} matrix")));
            }
            let mat = MatGfp::from_rows(m.clone(), da, cx.r.p());
            theta.table[j] = cx
                .der
                .coords(&mat)
                .ok_or_else(|| invalid(format!("cochain.theta[{j}] is not a derivation of A")))?;
        }
    }
    Ok(theta)
}

pub fn section_to_lr(section: &CochainSection, cx: &Complexes) -> Result<LrCochain, FormatError> {
    let dim_l = cx.dim_l();
    let mut mu = AltForm::zero(2, dim_l, dim_l);
    for &(i, j, k, v) in &section.mu {
        if i >= dim_l || j >= dim_l || k >= dim_l {
            return Err(invalid("cochain.mu: index out of range"));
        }
        if i == j {
            return Err(invalid("cochain.mu: diagonal entries must be omitted (alternating)"));
        }
        let (lo, hi, val) = if i < j { (i, j, v) } else { (j, i, neg_res(v, cx.p())) };
        let mut entry = mu.entry(&[lo, hi]).to_vec();
        entry[k] = (entry[k] + val) % cx.p();
        mu.set_entry(&[lo, hi], entry);
    }
    let mut omega = OmegaTable::zero(2, dim_l, dim_l);
    if let Some(rows) = &section.omega_basis {
        if rows.len() != dim_l || rows.iter().any(|r| r.len() != dim_l) {
            return Err(invalid("cochain.omega_basis: one row of dim L entries per basis vector"));
        }
        for (i, row) in rows.iter().enumerate() {
            omega.table[i][0] = row.iter().map(|&v| v % cx.p()).collect();
        }
    }
    let theta = theta_form(cx, &section.theta)?;
    Ok(LrCochain::D2 { mu, omega, theta })
}

pub fn section_to_p(section: &CochainSection, cx: &Complexes) -> Result<PCochain2, FormatError> {
    let p = cx.p();
    let dim_l = cx.dim_l();
    let mut mu = AltForm::zero(2, dim_l, dim_l);
    for &(i, j, k, v) in &section.mu {
        if i >= dim_l || j >= dim_l || k >= dim_l {
            return Err(invalid("cochain.mu: index out of range"));
        }
        if i == j {
            return Err(invalid("cochain.mu: diagonal entries must be omitted (alternating)"));
        }
        let (lo, hi, val) = if i < j { (i, j, v) } else { (j, i, neg_res(v, p)) };
        let mut entry = mu.entry(&[lo, hi]).to_vec();
        entry[k] = (entry[k] + val) % p;
        mu.set_entry(&[lo, hi], entry);
    }
    let total = (p as usize).pow(dim_l as u32);
    let mut omega = vec![vec![0u32; dim_l]; total];
    if let Some(points) = &section.omega_table {
        for pt in points {
            if pt.point.len() != dim_l || pt.value.len() != dim_l {
                return Err(invalid("cochain.omega_table: point and value must have dim L entries"));
            }
            if pt.point.iter().chain(&pt.value).any(|&v| v >= p) {
                return Err(invalid("cochain.omega_table: entries must be residues mod p"));
            }
            omega[point_rank(&pt.point, p)] = pt.value.clone();
        }
    }
    let theta = theta_form(cx, &section.theta)?;
    Ok(PCochain2 { mu, omega, theta })
}

/// Render a catalogue entry back into the file format (round-trip surface
/// for the built-in examples).
pub fn entry_to_file(entry: &rlr_core::registry::Entry) -> AlgebraFile {
    use rlr_core::registry::Entry;
    match entry {
        Entry::Algebra(a) => AlgebraFile {
            characteristic: a.p.get(),
            algebra: Some(algebra_section(a)),
            lie: None,
            action: None,
            anchor: None,
            cochain: None,
            deformation: None,
            candidate: None,
            automorphism: None,
        },
        Entry::Lie(l) => AlgebraFile {
            characteristic: l.p.get(),
            algebra: None,
            lie: Some(lie_section(l)),
            action: None,
            anchor: None,
            cochain: None,
            deformation: None,
            candidate: None,
            automorphism: None,
        },
        Entry::Bundle(r) => AlgebraFile {
            characteristic: r.p().get(),
            algebra: Some(algebra_section(&r.a)),
            lie: Some(lie_section(&r.l)),
            action: Some(action_triples(&r.action, r.a.dim, r.l.dim)),
            anchor: Some(
                r.anchor
                    .iter()
                    .map(|m| (0..m.rows()).map(|i| m.row(i).to_vec()).collect())
                    .collect(),
            ),
            cochain: None,
            deformation: None,
            candidate: None,
            automorphism: None,
        },
    }
}

fn algebra_section(a: &AlgebraPresentation) -> AlgebraSection {
    let mut products = Vec::new();
    for i in 0..a.dim {
        for j in 0..a.dim {
            for k in 0..a.dim {
                let v = a.mult.get(i, j, k);
                if v != 0 {
                    products.push((i, j, k, v));
                }
            }
        }
    }
    AlgebraSection {
        name: Some(a.name.clone()),
        dim: a.dim,
        basis: a.basis_labels.clone(),
        products,
    }
}

fn lie_section(l: &LiePresentation) -> LieSection {
    let mut brackets = Vec::new();
    for i in 0..l.dim {
        for j in i + 1..l.dim {
            for k in 0..l.dim {
                let v = l.bracket.get(i, j, k);
                if v != 0 {
                    brackets.push((i, j, k, v));
                }
            }
        }
    }
    LieSection {
        name: Some(l.name.clone()),
        dim: l.dim,
        basis: l.basis_labels.clone(),
        brackets,
        pmap: l.pmap_on_basis.clone(),
    }
}

fn action_triples(m: &ModuleAction, dim_a: usize, dim_l: usize) -> Vec<Triple> {
    let mut out = Vec::new();
    for a in 0..dim_a {
        for j in 0..dim_l {
            for k in 0..dim_l {
                let v = m.act.get(a, j, k);
                if v != 0 {
                    out.push((a, j, k, v));
                }
            }
        }
    }
    out
}
