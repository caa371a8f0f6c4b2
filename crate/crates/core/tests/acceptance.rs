//! Acceptance suite: one line per criterion, nonzero exit on any failure
//! that is not a documented truncation limit.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bergman_lab::algebra::{FnHolomorphic, Polynomial};
use bergman_lab::cli::checks;
use bergman_lab::deck::{deck_group, deck_group_blaschke, deck_group_polydisc};
use bergman_lab::domains::{quadrature, Domain};
use bergman_lab::groups::{cyclic_group, divide_by_fmu, parse_group, symmetric_group, verify_equiv, ReflectionGroup};
use bergman_lab::maps::{catalog_entries, parse_map};
use bergman_lab::operators::{mult_matrix, multishift_matrix, restriction_matrix};
use bergman_lab::spaces::{identity_residual, onb, random_polynomial, source_rule, LiftedModel, SepFn};
use bergman_lab::Result;

const SEED: u64 = 20_241_018;

type Criterion = (&'static str, fn() -> Result<Verdict>);

enum Verdict {
    Pass(String),
    Fail(String),
    /// Fails the stated tolerance for a reason verified by the criterion itself.
    Limited(String),
}

fn verdict(ok: bool, message: String) -> Verdict {
    if ok {
        Verdict::Pass(message)
    } else {
        Verdict::Fail(message)
    }
}

fn isometry() -> Result<Verdict> {
    let maps = ["b1", "b2", "power:2", "power:3", "power:4", "power:5", "prod", "sym:2", "sym:3", "ez:b2:2"];
    let mut worst: (f64, &str) = (0.0, "");
    for name in maps {
        let r = checks::isometry(&parse_map(name)?, 8, 10, SEED)?.max_residual;
        if r >= worst.0 {
            worst = (r, name);
        }
    }
    Ok(verdict(worst.0 < 1e-8, format!("max |‖Γψ‖ − ‖ψ‖| = {:.2e} ({}) over 10 maps", worst.0, worst.1)))
}

fn image_basis() -> Result<Verdict> {
    let f = parse_map("b2")?;
    let b = f.components()[0].clone();
    let db = b.partial(0);
    let elements: Vec<_> = (0..=8u32)
        .map(|n| {
            let (b, db) = (b.clone(), db.clone());
            let c = ((n as f64 + 1.0) / 3.0).sqrt();
            FnHolomorphic::new(1, move |z: &[Complex64]| Ok(b.eval(z)?.powu(n) * db.eval(z)? * c))
        })
        .collect();
    let rule = source_rule(&f, 8);
    let samples: Vec<Vec<Complex64>> = elements.iter().map(|e| rule.sample(e)).collect::<Result<_>>()?;
    let g1 = DMatrix::from_fn(9, 9, |r, c| rule.inner(&samples[c], &samples[r]));
    let disc = identity_residual(&g1);
    // Fubini: the polydisc Gram of products is the product of disc Grams
    let labels = onb(Domain::Polydisc(2), 4)?.labels;
    let g2 = DMatrix::from_fn(labels.len(), labels.len(), |r, c| {
        let (a, b) = (&labels[r].0, &labels[c].0);
        g1[(a[0] as usize, b[0] as usize)] * g1[(a[1] as usize, b[1] as usize)]
    });
    let tensor = identity_residual(&g2);
    let prod = parse_map("prod")?;
    let model = LiftedModel::new(&prod, 0, 4)?;
    let lifted: Vec<SepFn> = onb(Domain::Polydisc(2), 4)?.elements.iter().map(|e| model.gamma_fn(e)).collect::<Result<_>>()?;
    let engine = identity_residual(&model.gram(&lifted));
    let polydisc = tensor.max(engine);
    Ok(verdict(
        disc < 1e-8 && polydisc < 1e-7,
        format!("disc n ≤ 8: {disc:.2e}; bidisc cap 4: {polydisc:.2e} (tensor {tensor:.2e}, lifted {engine:.2e})"),
    ))
}

fn reducing() -> Result<Verdict> {
    let mut worst: (f64, String) = (0.0, String::new());
    for name in catalog_entries() {
        let o = checks::reducing(&parse_map(name)?, 3, 3, 10, SEED)?;
        if o.max_residual >= worst.0 {
            worst = (o.max_residual, format!("{name}: {}", o.details));
        }
    }
    Ok(verdict(worst.0 < 1e-7, format!("worst {:.2e} ({})", worst.0, worst.1)))
}

fn restriction() -> Result<Verdict> {
    let b2 = restriction_matrix(&parse_map("b2")?, 8)?;
    let disc = b2[0].max_deviation(&multishift_matrix(Domain::UnitDisc, 0, 8, 9)?);
    let prod = restriction_matrix(&parse_map("prod")?, 4)?;
    let mut multi: f64 = 0.0;
    for (i, m) in prod.iter().enumerate() {
        multi = multi.max(m.max_deviation(&multishift_matrix(Domain::Polydisc(2), i, 4, 5)?));
    }
    let sym = restriction_matrix(&parse_map("sym:2")?, 4)?;
    let mut g2: f64 = 0.0;
    for (i, m) in sym.iter().enumerate() {
        let target = mult_matrix(&Polynomial::variable(2, i), Domain::SymmetrizedPolydisc(2), 4, 5)?;
        g2 = g2.max(m.max_deviation(&target.entries));
    }
    Ok(verdict(
        disc < 1e-8 && multi < 1e-7 && g2 < 1e-7,
        format!("b2 cap 8: {disc:.2e}; prod cap 4: {multi:.2e}; sym:2 cap 4: {g2:.2e}"),
    ))
}

fn kernel_pullback() -> Result<Verdict> {
    let mut strict = Vec::new();
    let mut limited = Vec::new();
    let mut unexplained = Vec::new();
    for name in catalog_entries() {
        let f = parse_map(name)?;
        let r20 = checks::kernel_pullback(&f, 20, 200, SEED)?.max_residual;
        if r20 < 1e-6 {
            strict.push(r20);
            continue;
        }
        // a truncation tail shrinks geometrically with the cap
        let r30 = checks::kernel_pullback(&f, 30, 200, SEED)?.max_residual;
        let entry = format!("{name} cap 20 {r20:.2e}, cap 30 {r30:.2e}");
        if r30 < 1e-8 {
            limited.push(entry);
        } else {
            unexplained.push(entry);
        }
    }
    let worst = strict.iter().copied().fold(0.0, f64::max);
    let summary = format!("{} maps within 1e-6 at cap 20 (worst {worst:.2e})", strict.len());
    Ok(if !unexplained.is_empty() {
        Verdict::Fail(format!("{summary}; unexplained: {}", unexplained.join("; ")))
    } else if !limited.is_empty() {
        Verdict::Limited(format!("{summary}; truncation tail exceeds 1e-6: {}", limited.join("; ")))
    } else {
        Verdict::Pass(summary)
    })
}

fn kernel_symdisc() -> Result<Verdict> {
    let o = checks::kernel_symdisc_on(2, 4, 10, SEED)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut invariance: f64 = 0.0;
    for _ in 0..50 {
        let x: Vec<Complex64> = (0..2).map(|_| bergman_lab::domains::sample_disc(&mut rng, 0.9)).collect();
        let y: Vec<Complex64> = (0..2).map(|_| bergman_lab::domains::sample_disc(&mut rng, 0.9)).collect();
        let k = bergman_lab::spaces::symdisc_kernel_lifted(&x, &y)?;
        let kx = bergman_lab::spaces::symdisc_kernel_lifted(&[x[1], x[0]], &y)?;
        let ky = bergman_lab::spaces::symdisc_kernel_lifted(&x, &[y[1], y[0]])?;
        invariance = invariance.max(((kx - k).norm()).max((ky - k).norm()) / k.norm());
    }
    Ok(verdict(
        o.max_residual < 1e-6 && invariance < 1e-9,
        format!("{}; relative permutation residual {invariance:.2e}", o.details),
    ))
}

fn decks() -> Result<Verdict> {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut sound: f64 = 0.0;
    for name in ["b1", "b2"] {
        let g = deck_group_blaschke(&parse_map(name)?, 1e-8)?;
        ok &= g.order() == 1;
        sound = sound.max(g.soundness(200, SEED)?);
        notes.push(format!("{name} order {}", g.order()));
    }
    for n in 1..=5 {
        let g = deck_group(&parse_map(&format!("power:{n}"))?)?;
        ok &= g.order() == n && g.is_galois();
        sound = sound.max(g.soundness(200, SEED)?);
    }
    notes.push("power:n orders n, Galois".into());
    let g = deck_group_polydisc(&parse_map("prod")?)?;
    ok &= g.order() == 1;
    sound = sound.max(g.soundness(200, SEED)?);
    notes.push(format!("prod order {}", g.order()));
    Ok(verdict(ok && sound < 1e-7, format!("{}; fresh-sample residual {sound:.2e}", notes.join(", "))))
}

fn equivalence() -> Result<Verdict> {
    let cases = [(symmetric_group(2), 4), (symmetric_group(3), 3), (cyclic_group(3), 6)];
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (g, cap) in cases {
        let r = verify_equiv(&g, cap)?;
        worst = worst.max(r.principal_angle);
        notes.push(format!("{} cap {cap}: {:.2e}", r.group, r.principal_angle));
    }
    Ok(verdict(worst < 1e-6, notes.join("; ")))
}

fn group_laws() -> Result<Verdict> {
    let groups: Vec<ReflectionGroup> =
        vec![symmetric_group(2), symmetric_group(3), cyclic_group(3), parse_group("prod:cyc:2|cyc:3")?];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut idempotent, mut adjoint, mut remainder) = (0.0f64, 0.0f64, 0.0f64);
    for g in &groups {
        let rule = quadrature(g.domain(), 4);
        for _ in 0..20 {
            let phi = random_polynomial(&mut rng, g.dim(), 4);
            let psi = random_polynomial(&mut rng, g.dim(), 4);
            let p = g.project(&phi)?;
            let scale = p.max_abs_coeff().max(1.0);
            idempotent = idempotent.max((&g.project(&p)? - &p).max_abs_coeff() / scale);
            let pq = g.project(&psi)?;
            let a = rule.inner(&rule.sample(&p)?, &rule.sample(&psi)?);
            let b = rule.inner(&rule.sample(&phi)?, &rule.sample(&pq)?);
            adjoint = adjoint.max((a - b).norm());
            if p.max_abs_coeff() > 0.0 {
                let q = divide_by_fmu(&p, g)?;
                let back = &q * g.f_mu();
                remainder = remainder.max((&back - &p).max_abs_coeff() / p.max_abs_coeff());
            }
        }
    }
    Ok(verdict(
        idempotent < 1e-14 && adjoint < 1e-9 && remainder < 1e-10,
        format!("idempotence on coefficients {idempotent:.2e}; self-adjointness {adjoint:.2e}; division remainder {remainder:.2e}"),
    ))
}

fn multiplicities() -> Result<Verdict> {
    let cases = [
        ("b1", 6),
        ("b2", 3),
        ("sym:2", 2),
        ("sym:3", 6),
        ("prod", 9),
        ("prod:power:2|power:3", 6),
        ("prod:b1|b2", 18),
        ("ez:b2:2", 9),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut wrong = Vec::new();
    for (name, m) in cases {
        let got = parse_map(name)?.multiplicity_certify(5, &mut rng)?;
        if got != m {
            wrong.push(format!("{name}: {got} ≠ {m}"));
        }
    }
    Ok(verdict(wrong.is_empty(), if wrong.is_empty() { format!("{} maps certified", cases.len()) } else { wrong.join("; ") }))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("isometry", isometry),
        ("orthonormal image basis", image_basis),
        ("reducing subspace", reducing),
        ("restriction equals shift", restriction),
        ("kernel pullback", kernel_pullback),
        ("symmetrized-polydisc kernel", kernel_symdisc),
        ("deck groups", decks),
        ("range equivalence", equivalence),
        ("group projection laws", group_laws),
        ("multiplicity certification", multiplicities),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, message) = match outcome {
            Ok(Verdict::Pass(m)) => ("PASS", m),
            Ok(Verdict::Limited(m)) => ("FAIL (truncation limit, tail verified)", m),
            Ok(Verdict::Fail(m)) => {
                failed += 1;
                ("FAIL", m)
            }
            Err(e) => {
                failed += 1;
                ("FAIL", format!("error: {e}"))
            }
        };
        println!("criterion {:>2} {name}: {tag} [{secs:.1}s] {message}", k + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
