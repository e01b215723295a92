//! Command dispatch: resolve the subject (file or catalogue entry), gate
//! non-trivial commands behind full verification, run the requested
//! computation and assemble the report.

use crate::format::{entry_to_file, section_to_lr, section_to_p, AlgebraFile};
use crate::report::Report;
use crate::{Cli, Command, ExamplesAction, Outcome};
use rlr_core::algebra::{compute_derivations, LiePresentation};
use rlr_core::cochain::{d_res, fd_res, lr_differential, Complexes, LrCochain};
use rlr_core::cohomology::{
    compute_z2_b2_h2, compute_z2_res, lr_cochain_space, sample_subspace, verify_p_cocycle,
    verify_trivial_p_cocycle, CohomologyError, LrChart, ResChart,
};
use rlr_core::deformation::{
    check_deformation, find_extension, is_trivial_infinitesimal, obstruction_identities,
    obstructions, transport, DeformationError, FormalAutomorphism, TruncatedDeformation,
};
use rlr_core::gfp::{vec_ops, MatGfp};
use rlr_core::registry::{self, Entry};
use rlr_core::report::{Budget, CheckReport};

enum Subject {
    Entry(String, Entry),
    File(String, AlgebraFile),
}

impl Subject {
    fn label(&self) -> &str {
        match self {
            Subject::Entry(name, _) => name,
            Subject::File(name, _) => name,
        }
    }
}

fn resolve_subject(cli: &Cli) -> Result<Subject, Outcome> {
    match (&cli.example, &cli.input) {
        (Some(name), None) => match registry::lookup(name, cli.lambda1, cli.lambda2) {
            Some(entry) => Ok(Subject::Entry(name.clone(), entry)),
            None => Err(Outcome::InputError(format!(
                "unknown example {name}; try `rlr examples list`"
            ))),
        },
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Outcome::InputError(format!("{}: {e}", path.display())))?;
            let file = AlgebraFile::parse(&text)
                .map_err(|e| Outcome::InputError(format!("{}: {e}", path.display())))?;
            Ok(Subject::File(path.display().to_string(), file))
        }
        (Some(_), Some(_)) => Err(Outcome::InputError(
            "choose one of --example and --input".into(),
        )),
        (None, None) => Err(Outcome::InputError(
            "a subject is required: --example NAME or --input FILE".into(),
        )),
    }
}

fn bundle_of(subject: &Subject) -> Result<rlr_core::algebra::RlrAlgebra, Outcome> {
    match subject {
        Subject::Entry(_, Entry::Bundle(r)) => Ok(r.clone()),
        Subject::Entry(name, _) => Err(Outcome::InputError(format!(
            "example {name} has no full (A, L, action, anchor) bundle"
        ))),
        Subject::File(name, f) => f
            .bundle()
            .map_err(|e| Outcome::InputError(format!("{name}: {e}"))),
    }
}

fn file_of(subject: &Subject) -> AlgebraFile {
    match subject {
        Subject::Entry(_, entry) => entry_to_file(entry),
        Subject::File(_, f) => f.clone(),
    }
}

fn budget(cli: &Cli) -> Budget {
    Budget(cli.budget)
}

fn map_coh_err(e: CohomologyError) -> Outcome {
    match e {
        CohomologyError::BudgetExceeded(n) => Outcome::BudgetExceeded(format!("{n} evaluations")),
        other => Outcome::InputError(other.to_string()),
    }
}


fn square_matrix(rows: &[Vec<u32>], dim: usize, p: rlr_core::gfp::Prime, what: &str) -> Result<MatGfp, Outcome> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Outcome::InputError(format!("{what}: expected a {dim}x{dim} matrix")));
    }
    Ok(MatGfp::from_rows(rows.to_vec(), dim, p))
}

fn map_def_err(e: DeformationError) -> Outcome {
    match e {
        DeformationError::BudgetExceeded(n) => Outcome::BudgetExceeded(format!("{n} evaluations")),
        other => Outcome::InputError(other.to_string()),
    }
}

/// Full verification of whatever sections the subject carries.
fn verify_checks(subject: &Subject, b: Budget) -> Result<Vec<CheckReport>, Outcome> {
    let mut checks = Vec::new();
    match subject {
        Subject::Entry(_, Entry::Algebra(a)) => {
            checks.extend(a.check_commutative_associative().checks)
        }
        Subject::Entry(_, Entry::Lie(l)) => checks.extend(l.check_restricted_lie(b).checks),
        Subject::Entry(_, Entry::Bundle(r)) => checks.extend(r.check_rlr(b).checks),
        Subject::File(name, f) => {
            let has_bundle =
                f.algebra.is_some() && f.lie.is_some() && f.action.is_some() && f.anchor.is_some();
            if has_bundle {
                let r = f
                    .bundle()
                    .map_err(|e| Outcome::InputError(format!("{name}: {e}")))?;
                checks.extend(r.check_rlr(b).checks);
            } else {
                if f.algebra.is_some() {
                    let a = f
                        .algebra_presentation()
                        .map_err(|e| Outcome::InputError(format!("{name}: {e}")))?;
                    checks.extend(a.check_commutative_associative().checks);
                }
                if f.lie.is_some() {
                    let l = f
                        .lie_presentation()
                        .map_err(|e| Outcome::InputError(format!("{name}: {e}")))?;
                    checks.extend(l.check_restricted_lie(b).checks);
                }
                if checks.is_empty() {
                    return Err(Outcome::InputError(format!(
                        "{name}: nothing to verify (no algebra or lie section)"
                    )));
                }
            }
        }
    }
    Ok(checks)
}

/// Non-verify commands refuse subjects that fail verification.
fn gate(subject: &Subject, report: &mut Report, b: Budget) -> Result<(), Outcome> {
    let checks = verify_checks(subject, b)?;
    let ok = checks.iter().all(|c| c.passed());
    if !ok {
        report.push_checks(checks);
        report.note("subject fails verification; refusing to run the requested command");
        return Err(Outcome::CheckFailure(report.clone()));
    }
    report.push_checks(vec![CheckReport::pass("subject_verifies")]);
    Ok(())
}

fn deformation_of(
    file: &AlgebraFile,
    cx: &Complexes,
    cli: &Cli,
    b: Budget,
) -> Result<TruncatedDeformation, Outcome> {
    let section = file
        .deformation
        .as_ref()
        .ok_or_else(|| Outcome::InputError("missing deformation section".into()))?;
    let provided = section.coefficients.len();
    let order = cli.order.unwrap_or(provided);
    if order < provided {
        return Err(Outcome::InputError(format!(
            "--order {order} is below the {provided} provided coefficients"
        )));
    }
    let d = if cx.p() == 2 {
        let mut coeffs = Vec::new();
        for s in &section.coefficients {
            coeffs.push(section_to_lr(s, cx).map_err(|e| Outcome::InputError(e.to_string()))?);
        }
        for _ in provided..order {
            coeffs.push(LrCochain::zero(cx, 2));
        }
        TruncatedDeformation::from_lr_coefficients(cx, &coeffs).map_err(map_def_err)?
    } else {
        let mut coeffs = Vec::new();
        for s in &section.coefficients {
            coeffs.push(section_to_p(s, cx).map_err(|e| Outcome::InputError(e.to_string()))?);
        }
        for _ in provided..order {
            coeffs.push(rlr_core::cohomology::PCochain2::zero(cx));
        }
        TruncatedDeformation::from_p_coefficients(cx, &coeffs, b).map_err(map_def_err)?
    };
    Ok(d)
}

fn finish(report: Report) -> Outcome {
    if report.ok {
        Outcome::Ok(report)
    } else {
        Outcome::CheckFailure(report)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Examples { action } => return run_examples(cli, action),
        _ => {}
    }
    let subject = match resolve_subject(cli) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let b = budget(cli);
    match &cli.command {
        Command::Verify => {
            let mut report = Report::new("verify", subject.label());
            match verify_checks(&subject, b) {
                Ok(checks) => report.push_checks(checks),
                Err(o) => return o,
            }
            finish(report)
        }
        Command::Derivations => {
            let mut report = Report::new("derivations", subject.label());
            let a = match &subject {
                Subject::Entry(_, Entry::Algebra(a)) => a.clone(),
                Subject::Entry(_, Entry::Bundle(r)) => r.a.clone(),
                Subject::Entry(name, _) => {
                    return Outcome::InputError(format!("example {name} has no algebra section"))
                }
                Subject::File(name, f) => match f.algebra_presentation() {
                    Ok(a) => a,
                    Err(e) => return Outcome::InputError(format!("{name}: {e}")),
                },
            };
            let der = compute_derivations(&a);
            report.dim("Der_dim", der.dim());
            report.basis(
                "Der_basis_flat",
                der.mats.iter().map(|m| m.flatten()).collect(),
            );
            finish(report)
        }
        Command::PmapExtend => {
            let mut report = Report::new("pmap-extend", subject.label());
            let (l, file) = match &subject {
                Subject::Entry(_, Entry::Lie(l)) => (l.clone(), None),
                Subject::Entry(_, Entry::Bundle(r)) => (r.l.clone(), None),
                Subject::Entry(name, _) => {
                    return Outcome::InputError(format!("example {name} has no lie section"))
                }
                Subject::File(name, f) => match f.lie_presentation() {
                    Ok(l) => (l, Some(name.clone())),
                    Err(e) => return Outcome::InputError(format!("{name}: {e}")),
                },
            };
            let _ = file;
            let brackets: Vec<(usize, usize, usize, u32)> = {
                let mut t = Vec::new();
                for i in 0..l.dim {
                    for j in i + 1..l.dim {
                        for k in 0..l.dim {
                            let v = l.bracket.get(i, j, k);
                            if v != 0 {
                                t.push((i, j, k, v));
                            }
                        }
                    }
                }
                t
            };
            match LiePresentation::extend_pmap(
                l.name.clone(),
                l.p,
                l.basis_labels.clone(),
                &brackets,
                l.pmap_on_basis.clone(),
            ) {
                Ok(ext) => {
                    report.push_checks(vec![CheckReport::pass("pmap_hypothesis")]);
                    report.push_checks(ext.check_restricted_lie(b).checks);
                    report.basis("pmap_on_basis", ext.pmap_on_basis.clone());
                }
                Err(e) => {
                    report.push_checks(vec![CheckReport::fail("pmap_hypothesis", e.to_string())]);
                }
            }
            finish(report)
        }
        Command::Cohomology => {
            let mut report = Report::new("cohomology", subject.label());
            let r = match bundle_of(&subject) {
                Ok(r) => r,
                Err(o) => return o,
            };
            if r.p().get() != 2 {
                return Outcome::InputError(
                    "the degree-2 solver runs in characteristic 2; use verify-cocycle for p >= 3"
                        .into(),
                );
            }
            if let Err(o) = gate(&subject, &mut report, b) {
                return o;
            }
            let zres = match compute_z2_res(&r.l) {
                Ok(z) => z,
                Err(e) => return map_coh_err(e),
            };
            report.dim("Z2_res_dim", zres.dim());
            report.basis("Z2_res_basis", zres.basis().to_vec());
            let coh = match compute_z2_b2_h2(&r, b) {
                Ok(c) => c,
                Err(e) => return map_coh_err(e),
            };
            report.dim("Z2_LR_dim", coh.z_basis.dim());
            report.dim("B2_LR_dim", coh.b_basis.dim());
            report.dim("H2_LR_dim", coh.h_dim);
            report.basis("Z2_LR_basis", coh.z_basis.basis().to_vec());
            report.basis("B2_LR_basis", coh.b_basis.basis().to_vec());
            for (name, member) in &coh.named_cocycle_matches {
                report.member(name.clone(), *member);
            }
            report.note("chart coordinate order: mu block, omega block, theta block");
            if let Some(max_degree) = cli.degree {
                let cx = Complexes::new(&r);
                let mut certified = true;
                for n in 1..=max_degree.min(3) {
                    let chart = ResChart::new(&r.l, n);
                    for seed in 0..20u64 {
                        let v: Vec<u32> = (0..chart.len())
                            .map(|i| ((seed >> (i % 16)) & 1) as u32)
                            .collect();
                        let pair = chart.from_vec(&v);
                        let dd = d_res(&d_res(&pair, &cx.ctx_ll).unwrap(), &cx.ctx_ll).unwrap();
                        certified &= dd.is_zero();
                    }
                    let space = match lr_cochain_space(&cx, n, b) {
                        Ok(s) => s,
                        Err(e) => return map_coh_err(e),
                    };
                    let chart_n = LrChart::new(&cx, n);
                    for seed in 0..20u64 {
                        let v = sample_subspace(&space, seed);
                        let c1 = lr_differential(&cx, &chart_n.from_vec(&v)).unwrap();
                        certified &= lr_differential(&cx, &c1).unwrap().is_zero();
                        let m = rlr_core::cochain::lr_embed(&cx, &chart_n.from_vec(&v));
                        certified &= fd_res(&cx, &fd_res(&cx, &m).unwrap()).unwrap().is_zero();
                    }
                }
                report.push_checks(vec![if certified {
                    CheckReport::pass("complex_certification")
                } else {
                    CheckReport::fail("complex_certification", "a differential square is nonzero")
                }]);
            }
            finish(report)
        }
        Command::VerifyCocycle => {
            let mut report = Report::new("verify-cocycle", subject.label());
            let r = match bundle_of(&subject) {
                Ok(r) => r,
                Err(o) => return o,
            };
            if r.p().get() < 3 {
                return Outcome::InputError(
                    "the pointwise verifier runs for p >= 3; use cohomology for characteristic 2"
                        .into(),
                );
            }
            if let Err(o) = gate(&subject, &mut report, b) {
                return o;
            }
            let file = file_of(&subject);
            let cx = Complexes::new(&r);
            let c = match file.p_cochain(&cx) {
                Ok(c) => c,
                Err(e) => return Outcome::InputError(e.to_string()),
            };
            match verify_p_cocycle(&r, &c, b) {
                Ok(rep) => report.push_checks(rep.checks),
                Err(e) => return map_coh_err(e),
            }
            finish(report)
        }
        Command::DeformCheck => {
            let mut report = Report::new("deform-check", subject.label());
            let r = match bundle_of(&subject) {
                Ok(r) => r,
                Err(o) => return o,
            };
            if let Err(o) = gate(&subject, &mut report, b) {
                return o;
            }
            let file = file_of(&subject);
            let cx = Complexes::new(&r);
            let d = match deformation_of(&file, &cx, cli, b) {
                Ok(d) => d,
                Err(o) => return o,
            };
            report.dim("order", d.order);
            match check_deformation(&r, &d, b) {
                Ok(rep) => report.push_checks(rep.rows),
                Err(e) => return map_def_err(e),
            }
            finish(report)
        }
        Command::Obstruct => {
            let mut report = Report::new("obstruct", subject.label());
            let r = match bundle_of(&subject) {
                Ok(r) => r,
                Err(o) => return o,
            };
            if let Err(o) = gate(&subject, &mut report, b) {
                return o;
            }
            let file = file_of(&subject);
            let cx = Complexes::new(&r);
            let d = match deformation_of(&file, &cx, cli, b) {
                Ok(d) => d,
                Err(o) => return o,
            };
            report.dim("order", d.order);
            let obs = match obstructions(&r, &d, b) {
                Ok(o) => o,
                Err(DeformationError::NotADeformation(msg)) => {
                    report.push_checks(vec![CheckReport::fail("is_deformation", msg)]);
                    return finish(report);
                }
                Err(e) => return map_def_err(e),
            };
            report.push_checks(vec![CheckReport::pass("is_deformation")]);
            let zero1 = obs.obs1.iter().all(|(_, v)| vec_ops::is_zero(v));
            let zero2 = obs.obs2.iter().all(|(_, v)| vec_ops::is_zero(v));
            let zero3 = obs.mobs1.iter().all(|(_, v)| vec_ops::is_zero(v));
            let zero4 = obs.mobs2.iter().all(|(_, v)| vec_ops::is_zero(v));
            report.member("cyclic_obstruction_zero", zero1);
            report.member("quadratic_obstruction_zero", zero2);
            report.member("anchor_bracket_obstruction_zero", zero3);
            report.member("anchor_pmap_obstruction_zero", zero4);
            match find_extension(&r, &d, b) {
                Ok(Some(ext)) => {
                    report.member("extendable_at_next_order", true);
                    match obstruction_identities(&r, &d, &ext, b) {
                        Ok(rep) => report.push_checks(rep.checks),
                        Err(e) => return map_def_err(e),
                    }
                }
                Ok(None) => {
                    report.member("extendable_at_next_order", false);
                }
                Err(e) => return map_def_err(e),
            }
            finish(report)
        }
        Command::Transport => {
            let mut report = Report::new("transport", subject.label());
            let r = match bundle_of(&subject) {
                Ok(r) => r,
                Err(o) => return o,
            };
            if let Err(o) = gate(&subject, &mut report, b) {
                return o;
            }
            let file = file_of(&subject);
            let cx = Complexes::new(&r);
            let d = match deformation_of(&file, &cx, cli, b) {
                Ok(d) => d,
                Err(o) => return o,
            };
            let auto = match &file.automorphism {
                Some(a) => a,
                None => return Outcome::InputError("missing automorphism section".into()),
            };
            let mut mats = vec![MatGfp::identity(r.l.dim, r.p())];
            for (k, rows) in auto.phi.iter().enumerate() {
                match square_matrix(rows, r.l.dim, r.p(), &format!("automorphism.phi[{k}]")) {
                    Ok(m) => mats.push(m),
                    Err(o) => return o,
                }
            }
            let phi = match FormalAutomorphism::new(&r, mats) {
                Ok(phi) => phi,
                Err(e) => return Outcome::InputError(e.to_string()),
            };
            let moved = match transport(&r, &d, &phi) {
                Ok(m) => m,
                Err(e) => return map_def_err(e),
            };
            match check_deformation(&r, &moved, b) {
                Ok(rep) => {
                    let ok = rep.all_passed();
                    report.push_checks(vec![if ok {
                        CheckReport::pass("transported_is_deformation")
                    } else {
                        CheckReport::fail(
                            "transported_is_deformation",
                            rep.failed().first().map(|c| c.name.clone()).unwrap_or_default(),
                        )
                    }]);
                }
                Err(e) => return map_def_err(e),
            }
            let chart = LrChart::new(&cx, 2);
            for k in 1..=moved.order {
                let coeff = LrCochain::D2 {
                    mu: moved.mu[k].clone(),
                    omega: match &moved.omega {
                        rlr_core::deformation::OmegaCoeffs::Char2(v) => v[k].clone(),
                        _ => unreachable!("transport is characteristic 2"),
                    },
                    theta: moved.rho[k].clone(),
                };
                report.basis(format!("transported_t^{k}"), vec![chart.to_vec(&coeff)]);
            }
            finish(report)
        }
        Command::TrivialTest => {
            let mut report = Report::new("trivial-test", subject.label());
            let r = match bundle_of(&subject) {
                Ok(r) => r,
                Err(o) => return o,
            };
            if let Err(o) = gate(&subject, &mut report, b) {
                return o;
            }
            let file = file_of(&subject);
            let cx = Complexes::new(&r);
            if r.p().get() == 2 {
                let d = match deformation_of(&file, &cx, cli, b) {
                    Ok(d) => d,
                    Err(o) => return o,
                };
                match is_trivial_infinitesimal(&r, &d, b) {
                    Ok(t) => report.member("infinitesimal_in_B2_LR", t),
                    Err(e) => return map_def_err(e),
                }
            } else {
                let c = match file.p_cochain(&cx) {
                    Ok(c) => c,
                    Err(e) => return Outcome::InputError(e.to_string()),
                };
                let cand = match &file.candidate {
                    Some(c) => c,
                    None => return Outcome::InputError("missing candidate section".into()),
                };
                let gamma = match square_matrix(&cand.gamma, r.l.dim, r.p(), "candidate.gamma") {
                    Ok(m) => m,
                    Err(o) => return o,
                };
                let dmat = match square_matrix(&cand.d, r.a.dim, r.p(), "candidate.d") {
                    Ok(m) => m,
                    Err(o) => return o,
                };
                let dcoords = match cx.der.coords(&dmat) {
                    Some(c) => c,
                    None => return Outcome::InputError("candidate.d is not a derivation of A".into()),
                };
                match verify_trivial_p_cocycle(&r, &c, &gamma, &dcoords, !cli.a_linear_c1, b) {
                    Ok((trivial, rep)) => {
                        report.member("trivial_against_candidate", trivial);
                        report.push_checks(rep.checks);
                        // membership verdicts are data, not failures
                        report.ok = true;
                    }
                    Err(CohomologyError::Candidate(msg)) => {
                        return Outcome::InputError(format!("candidate constraint: {msg}"))
                    }
                    Err(e) => return map_coh_err(e),
                }
            }
            finish(report)
        }
        Command::Examples { .. } => unreachable!("handled above"),
    }
}

fn run_examples(cli: &Cli, action: &ExamplesAction) -> Outcome {
    match action {
        ExamplesAction::List => {
            let mut report = Report::new("examples list", "catalogue");
            for name in registry::names() {
                report.note(name.to_string());
            }
            Outcome::Ok(report)
        }
        ExamplesAction::Run { name, cohomology } => {
            let Some(entry) = registry::lookup(name, cli.lambda1, cli.lambda2) else {
                return Outcome::InputError(format!("unknown example {name}"));
            };
            let subject = Subject::Entry(name.clone(), entry);
            let mut report = Report::new("examples run", subject.label());
            let b = budget(cli);
            match verify_checks(&subject, b) {
                Ok(checks) => report.push_checks(checks),
                Err(o) => return o,
            }
            if *cohomology {
                if !report.ok {
                    report.note("verification failed; cohomology skipped");
                    return Outcome::CheckFailure(report);
                }
                let r = match bundle_of(&subject) {
                    Ok(r) => r,
                    Err(o) => return o,
                };
                if r.p().get() != 2 {
                    return Outcome::InputError(
                        "cohomology flag requires a characteristic-2 bundle".into(),
                    );
                }
                let zres = match compute_z2_res(&r.l) {
                    Ok(z) => z,
                    Err(e) => return map_coh_err(e),
                };
                report.dim("Z2_res_dim", zres.dim());
                let coh = match compute_z2_b2_h2(&r, b) {
                    Ok(c) => c,
                    Err(e) => return map_coh_err(e),
                };
                report.dim("Z2_LR_dim", coh.z_basis.dim());
                report.dim("B2_LR_dim", coh.b_basis.dim());
                report.dim("H2_LR_dim", coh.h_dim);
                for (cname, member) in &coh.named_cocycle_matches {
                    report.member(cname.clone(), *member);
                }
            }
            finish(report)
        }
    }
}
