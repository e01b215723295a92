//! Acceptance suite: the quantitative fixtures and the property-level
//! guarantees of the engine, one test per criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see the passing ones).
//!
//! Expected values come from the source classification table and example
//! computations. Where an expectation is inconsistent with the defining
//! equations themselves, the test still asserts the stated value and is
//! allowed to fail; the printed line carries the computed value so the
//! discrepancy is visible. See the repository README for the list of known
//! red criteria and the short certificates behind them.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rlr_core::algebra::{compute_derivations, LiePresentation};
use rlr_core::cochain::{
    d_res, fd_res, lr_differential, validate_lr, AltForm, Complexes, LrCochain, MorphCochain,
    OmegaTable, ResPair, Third,
};
use rlr_core::cohomology::{
    compute_z2_b2_h2, compute_z2_res, lr_cochain_space, reference_cocycles, sample_subspace,
    verify_p_cocycle, LrChart, ResChart,
};
use rlr_core::deformation::{
    check_deformation, extension_system, find_extension, is_trivial_infinitesimal,
    obstruction_identities, transport, FormalAutomorphism, TruncatedDeformation,
};
use rlr_core::gfp::{vec_ops, MatGfp, Prime, Subspace};
use rlr_core::registry;
use rlr_core::report::Budget;
use std::time::Instant;

fn gf2() -> Prime {
    Prime::new(2).unwrap()
}

struct Criterion {
    label: &'static str,
    limit_s: f64,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str, limit_s: f64) -> Self {
        Criterion {
            label,
            limit_s,
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        if !ok {
            self.failures.push(detail.into());
        }
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if elapsed > self.limit_s {
            self.failures
                .push(format!("runtime {elapsed:.2}s exceeds {}s", self.limit_s));
        }
        if self.failures.is_empty() {
            println!("{}: PASS ({elapsed:.2}s)", self.label);
        } else {
            println!("{}: FAIL ({elapsed:.2}s) — {}", self.label, self.failures.join("; "));
        }
        assert!(self.failures.is_empty(), "{}: {}", self.label, self.failures.join("; "));
    }
}

fn der_span(mats: &[MatGfp]) -> Subspace {
    Subspace::from_spanning(4, gf2(), mats.iter().map(|m| m.flatten()).collect())
}

fn elementary(i: usize, j: usize) -> MatGfp {
    // the derivation-style basis matrix sending e_{j+1} to e_{i+1}
    let mut m = MatGfp::zeros(2, 2, gf2());
    m.set(i, j, 1);
    m
}

/// Criterion 1: the derivation tables of the five two-dimensional
/// commutative algebras.
#[test]
fn criterion_01_derivation_tables() {
    let mut c = Criterion::new("criterion 01 (derivation tables)", 1.0);
    let expected: Vec<(usize, Vec<MatGfp>)> = vec![
        (1, vec![elementary(1, 1)]),
        (2, vec![elementary(1, 0)]),
        (3, vec![]),
        (4, vec![elementary(0, 1), elementary(1, 1)]),
        (5, vec![]),
    ];
    for (n, mats) in expected {
        let computed = compute_derivations(&registry::algebra_a(n));
        let want = der_span(&mats);
        let got = der_span(&computed.mats);
        c.check(
            got == want,
            format!("A{n}: expected dim {}, computed dim {}", want.dim(), got.dim()),
        );
    }
    c.finish();
}

/// Criterion 2: the rigid bundle has vanishing degree-2 cocycle spaces.
#[test]
fn criterion_02_rigid_example() {
    let mut c = Criterion::new("criterion 02 (rigid example)", 1.0);
    let r = registry::rigid_a4();
    let zres = compute_z2_res(&r.l).unwrap();
    c.check(zres.dim() == 0, format!("Z2_res expected dim 0, computed {}", zres.dim()));
    let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
    c.check(
        coh.z_basis.dim() == 0,
        format!(
            "Z2_LR expected dim 0, computed {} (B2_LR dim {}, H2 dim {})",
            coh.z_basis.dim(),
            coh.b_basis.dim(),
            coh.h_dim
        ),
    );
    c.finish();
}

/// Criterion 3: the zero-p-map abelian bundle.
#[test]
fn criterion_03_lab0_example() {
    let mut c = Criterion::new("criterion 03 (Lab0_A4)", 5.0);
    let r = registry::lab0_a4();
    let cx = Complexes::new(&r);
    let zres = compute_z2_res(&r.l).unwrap();
    c.check(zres.dim() == 6, format!("Z2_res expected 6, computed {}", zres.dim()));
    let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
    c.check(
        coh.z_basis.dim() == 4,
        format!("Z2_LR expected 4, computed {}", coh.z_basis.dim()),
    );
    c.check(
        coh.b_basis.dim() == 0,
        format!("B2_LR expected 0, computed {}", coh.b_basis.dim()),
    );
    for (name, member) in &coh.named_cocycle_matches {
        c.check(*member, format!("{name} not a member of Z2_LR"));
    }
    // the theta tables are forced by the constraint analysis: among the
    // cocycles, mu-part mu1 pins theta to th1 and mu2 pins theta to th2
    let chart = LrChart::new(&cx, 2);
    let named = reference_cocycles(&cx, &r.name);
    for (target_mu, reference) in [(vec![1u32, 0], &named[0].1), (vec![0u32, 1], &named[1].1)] {
        let LrCochain::D2 { omega: ref_omega, theta: ref_theta, .. } = reference else {
            panic!("degree-2 reference")
        };
        let mut found = 0usize;
        for rank in 0..(1u32 << coh.z_basis.dim()) {
            let mut v = vec![0u32; chart.dim()];
            for (b, basis_vec) in coh.z_basis.basis().iter().enumerate() {
                if (rank >> b) & 1 == 1 {
                    vec_ops::add_assign(&mut v, basis_vec, 2);
                }
            }
            let LrCochain::D2 { mu, omega, theta } = chart.from_vec(&v) else {
                panic!("degree-2 chart")
            };
            if mu.entry(&[0, 1]) == target_mu.as_slice() && &omega == ref_omega {
                found += 1;
                c.check(&theta == ref_theta, format!("theta table forced for mu={target_mu:?}"));
            }
        }
        c.check(found > 0, format!("no cocycle with mu-part {target_mu:?}"));
    }
    c.finish();
}

/// Criterion 4: the abelian bundle with nontrivial p-map, stable across
/// the stated parameter choices.
#[test]
fn criterion_04_lab1_example() {
    let mut c = Criterion::new("criterion 04 (Lab1_A4)", 5.0);
    let mut dims_seen = Vec::new();
    for (l1, l2) in [(1u32, 0u32), (1, 1), (0, 1)] {
        let r = registry::lab1_a4(l1, l2);
        let cx = Complexes::new(&r);
        let zres = compute_z2_res(&r.l).unwrap();
        c.check(
            zres.dim() == 5,
            format!("lambda ({l1},{l2}): Z2_res expected 5, computed {}", zres.dim()),
        );
        let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
        c.check(
            coh.z_basis.dim() == 3,
            format!("lambda ({l1},{l2}): Z2_LR expected 3, computed {}", coh.z_basis.dim()),
        );
        c.check(
            coh.b_basis.dim() == 0,
            format!("lambda ({l1},{l2}): B2_LR expected 0, computed {}", coh.b_basis.dim()),
        );
        let chart = LrChart::new(&cx, 2);
        for (name, cochain) in reference_cocycles(&cx, &r.name) {
            let member = coh.z_basis.contains(&chart.to_vec(&cochain));
            c.check(member, format!("lambda ({l1},{l2}): {name} not a member"));
        }
        dims_seen.push((zres.dim(), coh.z_basis.dim(), coh.b_basis.dim()));
    }
    c.check(
        dims_seen.windows(2).all(|w| w[0] == w[1]),
        format!("dimensions vary across lambda: {dims_seen:?}"),
    );
    c.finish();
}

/// Criterion 5: the Witt algebra at p = 5 and p = 7.
#[test]
fn criterion_05_witt() {
    let mut c = Criterion::new("criterion 05 (Witt W(1))", 10.0);
    for p in [5u32, 7] {
        let w = registry::witt(p);
        let rep = w.check_restricted_lie(Budget::default());
        c.check(
            rep.all_passed(),
            format!("W1({p}) verification fails: {:?}", rep.failed_names()),
        );
        let brackets: Vec<(usize, usize, usize, u32)> = {
            let mut t = Vec::new();
            for i in 0..w.dim {
                for j in i + 1..w.dim {
                    for k in 0..w.dim {
                        let v = w.bracket.get(i, j, k);
                        if v != 0 {
                            t.push((i, j, k, v));
                        }
                    }
                }
            }
            t
        };
        match LiePresentation::extend_pmap(
            format!("W1({p})"),
            w.p,
            w.basis_labels.clone(),
            &brackets,
            registry::witt_pmap_images(p),
        ) {
            Ok(ext) => {
                c.check(
                    ext.pmap_on_basis == w.pmap_on_basis,
                    format!("W1({p}): extension does not reproduce the stated p-map"),
                );
                // spot agreement off the basis
                for probe in [vec![1u32; p as usize], {
                    let mut v = vec![0u32; p as usize];
                    v[0] = 1;
                    v[1] = 2;
                    v
                }] {
                    c.check(
                        ext.pmap_eval(&probe) == w.pmap_eval(&probe),
                        format!("W1({p}): p-map values differ at {probe:?}"),
                    );
                }
            }
            Err(e) => c.check(false, format!("W1({p}): extension rejected: {e}")),
        }
    }
    c.finish();
}

fn random_res_pair(chart: &ResChart, rng: &mut StdRng) -> ResPair {
    let v: Vec<u32> = (0..chart.len()).map(|_| rng.gen_range(0..2)).collect();
    chart.from_vec(&v)
}

fn random_morph(cx: &Complexes, n: usize, rng: &mut StdRng) -> MorphCochain {
    let mut mc = MorphCochain::zero(cx, n);
    let fill_alt = |f: &mut AltForm, rng: &mut StdRng| {
        for row in f.table.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.gen_range(0..2);
            }
        }
    };
    let fill_omega = |o: &mut OmegaTable, rng: &mut StdRng| {
        for zrow in o.table.iter_mut() {
            for v in zrow.iter_mut() {
                for x in v.iter_mut() {
                    *x = rng.gen_range(0..2);
                }
            }
        }
    };
    fill_alt(&mut mc.first.phi, rng);
    if let Some(o) = mc.first.omega.as_mut() {
        fill_omega(o, rng);
    }
    fill_alt(&mut mc.second.phi, rng);
    if let Some(o) = mc.second.omega.as_mut() {
        fill_omega(o, rng);
    }
    match &mut mc.third {
        Third::Const(v) => {
            for x in v.iter_mut() {
                *x = rng.gen_range(0..2);
            }
        }
        Third::Map(f) => fill_alt(f, rng),
        Third::Pair(pr) => {
            fill_alt(&mut pr.phi, rng);
            if let Some(o) = pr.omega.as_mut() {
                fill_omega(o, rng);
            }
        }
    }
    mc
}

/// Criterion 6: consecutive differentials compose to zero on the
/// restricted, morphism and Lie-Rinehart complexes, degrees 1 to 3, for
/// every characteristic-2 catalogue bundle.
#[test]
fn criterion_06_complex_certification() {
    let mut c = Criterion::new("criterion 06 (complex certification)", 30.0);
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    for r in registry::char2_bundles() {
        let cx = Complexes::new(&r);
        for n in 1..=3usize {
            // restricted complex on L
            let chart = ResChart::new(&r.l, n);
            for _ in 0..50 {
                let pair = random_res_pair(&chart, &mut rng);
                let dd = d_res(&d_res(&pair, &cx.ctx_ll).unwrap(), &cx.ctx_ll).unwrap();
                if !dd.is_zero() {
                    c.check(false, format!("{}: restricted d^2 != 0 at degree {n}", r.name));
                    break;
                }
            }
            // morphism complex
            for _ in 0..50 {
                let mc = random_morph(&cx, n, &mut rng);
                let dd = fd_res(&cx, &fd_res(&cx, &mc).unwrap()).unwrap();
                if !dd.is_zero() {
                    c.check(false, format!("{}: morphism d^2 != 0 at degree {n}", r.name));
                    break;
                }
            }
            // Lie-Rinehart sub-complex: random members of the constraint
            // kernel
            let space = lr_cochain_space(&cx, n, Budget::default()).unwrap();
            let chart_n = LrChart::new(&cx, n);
            for seed in 0..50u64 {
                let v = sample_subspace(&space, seed.wrapping_mul(n as u64 + 1));
                let cochain = chart_n.from_vec(&v);
                let d1 = lr_differential(&cx, &cochain).unwrap();
                let d2 = lr_differential(&cx, &d1).unwrap();
                if !d2.is_zero() {
                    c.check(false, format!("{}: LR d^2 != 0 at degree {n}", r.name));
                    break;
                }
            }
        }
    }
    c.finish();
}

/// Criterion 7: brute-force enumeration of the degree-2 chart over GF(2)
/// reproduces the solver's cocycle membership set exactly.
#[test]
fn criterion_07_oracle_equivalence() {
    let mut c = Criterion::new("criterion 07 (oracle equivalence)", 60.0);
    let r = registry::lab0_a4();
    let cx = Complexes::new(&r);
    let chart = LrChart::new(&cx, 2);
    let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
    let mut mismatches = 0usize;
    for rank in 0..(1u32 << chart.dim()) {
        let v: Vec<u32> = (0..chart.dim()).map(|i| (rank >> i) & 1).collect();
        let cochain = chart.from_vec(&v);
        // oracle: the defining conditions, evaluated directly
        let member_oracle = validate_lr(&cx, &cochain).all_passed()
            && lr_differential(&cx, &cochain)
                .map(|d| d.is_zero())
                .unwrap_or(false);
        if member_oracle != coh.z_basis.contains(&v) {
            mismatches += 1;
        }
    }
    c.check(mismatches == 0, format!("{mismatches} membership mismatches"));
    c.finish();
}

/// Criterion 8: an order-1 triple satisfies the deformation equations mod
/// t^2 exactly when its coefficient is a cocycle.
#[test]
fn criterion_08_infinitesimal_iff_cocycle() {
    let mut c = Criterion::new("criterion 08 (infinitesimal iff cocycle)", 30.0);
    let bundles = registry::char2_bundles();
    let mut tested = 0usize;
    let mut seed = 0u64;
    'outer: for round in 0..100u64 {
        for r in &bundles {
            let cx = Complexes::new(r);
            let space = lr_cochain_space(&cx, 2, Budget::default()).unwrap();
            let chart = LrChart::new(&cx, 2);
            let coh = compute_z2_b2_h2(r, Budget::default()).unwrap();
            seed = seed.wrapping_add(round + 1);
            let v = sample_subspace(&space, seed);
            let cochain = chart.from_vec(&v);
            let d = TruncatedDeformation::from_lr_coefficients(&cx, &[cochain]).unwrap();
            let rep = check_deformation(r, &d, Budget::default()).unwrap();
            let in_z = coh.z_basis.contains(&v);
            if rep.all_passed() != in_z {
                c.check(
                    false,
                    format!("{}: deformation verdict {} vs membership {}", r.name, rep.all_passed(), in_z),
                );
                break 'outer;
            }
            tested += 1;
            if tested >= 200 {
                break 'outer;
            }
        }
    }
    c.check(tested >= 200, format!("only {tested} samples"));
    c.finish();
}

/// Criterion 9: for every order-1 deformation the solver extends to order
/// 2, both obstruction identities hold coefficient-exactly.
#[test]
fn criterion_09_obstruction_identities() {
    let mut c = Criterion::new("criterion 09 (obstruction identities)", 30.0);
    let mut extended = 0usize;
    for r in registry::char2_bundles() {
        let cx = Complexes::new(&r);
        let coh = compute_z2_b2_h2(&r, Budget::default()).unwrap();
        let chart = LrChart::new(&cx, 2);
        for rank in 0..(1u32 << coh.z_basis.dim()) {
            let mut v = vec![0u32; chart.dim()];
            for (b, basis_vec) in coh.z_basis.basis().iter().enumerate() {
                if (rank >> b) & 1 == 1 {
                    vec_ops::add_assign(&mut v, basis_vec, 2);
                }
            }
            let d = TruncatedDeformation::from_lr_coefficients(&cx, &[chart.from_vec(&v)]).unwrap();
            if let Some(ext) = find_extension(&r, &d, Budget::default()).unwrap() {
                extended += 1;
                let rep = obstruction_identities(&r, &d, &ext, Budget::default()).unwrap();
                c.check(
                    rep.all_passed(),
                    format!("{} rank {rank}: {:?}", r.name, rep.failed_names()),
                );
            }
        }
    }
    c.check(extended > 0, "no order-1 deformation extended");
    c.finish();
}

fn random_a_linear_automorphism(r: &rlr_core::algebra::RlrAlgebra, order: usize, rng: &mut StdRng) -> FormalAutomorphism {
    // A-linear matrices for the catalogue action are lower triangular with
    // equal diagonal: [[a, 0], [c, a]]
    let mut phi = vec![MatGfp::identity(2, r.p())];
    for _ in 0..order {
        let a = rng.gen_range(0..2);
        let cc = rng.gen_range(0..2);
        phi.push(MatGfp::from_rows(vec![vec![a, 0], vec![cc, a]], 2, r.p()));
    }
    FormalAutomorphism::new(r, phi).expect("A-linear by construction")
}

/// Criterion 10: transports of the undeformed triple land in the
/// coboundary space, and transport followed by the inverse restores every
/// deformation exactly.
#[test]
fn criterion_10_equivalence() {
    let mut c = Criterion::new("criterion 10 (equivalence transport)", 30.0);
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let bundles = registry::char2_bundles();
    for round in 0..50 {
        let r = &bundles[round % bundles.len()];
        let cx = Complexes::new(r);
        let phi = random_a_linear_automorphism(r, 3, &mut rng);
        let undeformed = TruncatedDeformation::undeformed(&cx, 3);
        let moved = transport(r, &undeformed, &phi).unwrap();
        match is_trivial_infinitesimal(r, &moved, Budget::default()) {
            Ok(true) => {}
            Ok(false) => c.check(false, format!("{}: transported infinitesimal not a coboundary", r.name)),
            Err(e) => c.check(false, format!("{}: {e}", r.name)),
        }
        // round trip on a genuinely deformed triple when one exists
        let coh = compute_z2_b2_h2(r, Budget::default()).unwrap();
        let chart = LrChart::new(&cx, 2);
        let v = sample_subspace(&coh.z_basis, 7 + round as u64);
        let d = TruncatedDeformation::from_lr_coefficients(&cx, &[chart.from_vec(&v)]).unwrap();
        let there = transport(r, &d, &phi).unwrap();
        let back = transport(r, &there, &phi.inverse_at(3)).unwrap();
        let same = back.mu == d.mu && back.rho == d.rho && back.omega == d.omega;
        c.check(same, format!("{}: round trip does not restore coefficients", r.name));
    }
    c.finish();
}

/// Criterion 11: the p = 3 property suite on the toy bundles with zero
/// anchor.
#[test]
fn criterion_11_p3_suite() {
    let mut c = Criterion::new("criterion 11 (p = 3 suite)", 60.0);
    let toys = [registry::toy_t1_p3(), registry::toy_t2_p3(), registry::toy_t3_p3()];

    // (a) every valid order-1 deformation's infinitesimal passes the
    // pointwise cocycle verifier; the valid order-1 coefficients are the
    // kernel of the extension system over the undeformed base
    for r in &toys {
        let cx = Complexes::new(r);
        let base = TruncatedDeformation::undeformed(&cx, 0);
        let sys = extension_system(r, &base).unwrap();
        let kernel = sys.kernel();
        let members: Vec<Vec<u32>> = if kernel.dim() <= 5 {
            // enumerate the whole solution space
            let mut v = Vec::new();
            let p = 3u64;
            let total = p.pow(kernel.dim() as u32);
            for rank in 0..total {
                let mut u = vec![0u32; sys.unknowns];
                let mut rr = rank;
                for b in kernel.basis() {
                    let coef = (rr % p) as u32;
                    rr /= p;
                    if coef != 0 {
                        vec_ops::add_assign(&mut u, &vec_ops::scale(coef, b, 3), 3);
                    }
                }
                v.push(u);
            }
            v
        } else {
            (0..100u64).map(|s| sample_subspace(&kernel, s)).collect()
        };
        for (idx, u) in members.iter().enumerate() {
            let ext = sys.materialize(u);
            let rep = check_deformation(r, &ext, Budget::default()).unwrap();
            c.check(
                rep.all_passed(),
                format!("{}: kernel member {idx} is not a deformation", r.name),
            );
            let inf = ext.infinitesimal_p().unwrap();
            let vrep = verify_p_cocycle(r, &inf, Budget::default()).unwrap();
            c.check(
                vrep.all_passed(),
                format!("{}: infinitesimal {idx} fails {:?}", r.name, vrep.failed_names()),
            );
        }
    }

    // (b) constructed order-2 extensions satisfy the obstruction
    // identities including the t^2 residual of the fifth equation
    for r in &toys {
        let cx = Complexes::new(r);
        let base = TruncatedDeformation::undeformed(&cx, 0);
        let sys = extension_system(r, &base).unwrap();
        let kernel = sys.kernel();
        let mut tested = 0usize;
        for seed in 0..40u64 {
            let u = sample_subspace(&kernel, seed);
            let d1 = sys.materialize(&u);
            if let Some(d2) = find_extension(r, &d1, Budget::default()).unwrap() {
                tested += 1;
                let rep = obstruction_identities(r, &d1, &d2, Budget::default()).unwrap();
                c.check(
                    rep.all_passed(),
                    format!("{} seed {seed}: {:?}", r.name, rep.failed_names()),
                );
            }
        }
        c.check(tested > 0, format!("{}: no order-2 extension constructed", r.name));
    }

    // (c) the addition law against the unique-extension oracle,
    // exhaustively over all 81 pairs of the nonabelian toy
    let l = &toys[2].l;
    for x in vec_ops::enumerate_all(2, 3) {
        for y in vec_ops::enumerate_all(2, 3) {
            let si = l.jacobson_si(&x, &y);
            let mut rhs = l.pmap_eval(&x);
            vec_ops::add_assign(&mut rhs, &l.pmap_eval(&y), 3);
            for s in &si {
                vec_ops::add_assign(&mut rhs, s, 3);
            }
            let lhs = l.pmap_eval(&vec_ops::add(&x, &y, 3));
            c.check(lhs == rhs, format!("addition law fails at x={x:?}, y={y:?}"));
        }
    }
    c.finish();
}
