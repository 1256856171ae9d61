//! Subcommand implementations and their JSON reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use catkit_core::classify::{
    classify_germ, ClassificationResult, ClassifyError, ClassifyOpts, Family, Presentation,
};
use catkit_core::formats::{parse_germ, parse_unfolding, AnyJet, Germ, GermSpec};
use catkit_core::group::SignAction;
use catkit_core::local_algebra::{
    codimension, determinacy_order, AlgebraError, AlgebraOpts, CodimValue,
};
use catkit_core::meanfield::{
    annotate, classify_critical_point, coupling_transversality, default_couplings,
    find_critical_points, global_minimizer, parse_sweep, phase_diagram, tune_pairing,
    tune_strong_coupling, CriticalPoint, Minimizer, ModelSpec, PhaseOpts, SolveOpts,
};
use catkit_core::poly::{Jet, Scalar};
use catkit_core::unfolding::{is_transversal, universal_unfolding, Unfolding, UnfoldingError};

use crate::{status, AlgebraArgs, Failure, OutArgs};

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)
}

fn emit(out: &OutArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::input),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())
                .and_then(|_| o.flush())
                .map_err(|e| Failure::input(anyhow!(e)))
        }
    }
}

fn emit_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::numeric(anyhow!(e)))?;
    s.push('\n');
    emit(out, &s)
}

fn algebra_opts(alg: &AlgebraArgs) -> AlgebraOpts {
    AlgebraOpts {
        cap: alg.cap,
        tol: alg.tol,
    }
}

fn algebra_failure(e: AlgebraError) -> Failure {
    Failure::input(e)
}

fn unfolding_failure(e: UnfoldingError) -> Failure {
    match e {
        UnfoldingError::Undecidable(_) => Failure {
            code: status::CAP,
            error: anyhow!(e),
        },
        other => Failure::input(other),
    }
}

fn load_germ(
    path: &Path,
    order: Option<u32>,
    alg: &AlgebraArgs,
) -> Result<(Germ, SignAction), Failure> {
    let mut germ = parse_germ(&read(path)?).map_err(Failure::input)?;
    if let Some(k) = order {
        germ.jet = match germ.jet {
            AnyJet::Rational(j) => AnyJet::Rational(j.with_order(k)),
            AnyJet::Float(j) => AnyJet::Float(j.with_order(k)),
        };
    }
    let action = germ
        .resolve_action(alg.action_spec()?.as_ref())
        .map_err(Failure::input)?;
    Ok((germ, action))
}

#[derive(Serialize)]
struct CodimOut {
    value: CodimValue,
    order_used: u32,
    certified: bool,
    complement: Vec<String>,
    sigma: Option<u32>,
}

fn codim_report<C: Scalar>(
    f: &Jet<C>,
    vars: &[String],
    action: &SignAction,
    opts: &AlgebraOpts,
    want_sigma: bool,
) -> Result<CodimOut, Failure> {
    let r = codimension(f, action, opts).map_err(algebra_failure)?;
    let sigma = if want_sigma || r.finite().is_some() {
        determinacy_order(f, action, opts)
            .map_err(algebra_failure)?
            .order()
    } else {
        None
    };
    Ok(CodimOut {
        value: r.value,
        order_used: r.order_used,
        certified: r.certified,
        complement: r.complement.iter().map(|m| m.render(vars)).collect(),
        sigma,
    })
}

/// `codim` and `determine`; the latter exits 3 when σ is not certified.
pub fn codim(
    path: &Path,
    order: Option<u32>,
    alg: &AlgebraArgs,
    out: &OutArgs,
    determine: bool,
) -> Result<u8, Failure> {
    let (germ, action) = load_germ(path, order, alg)?;
    let opts = algebra_opts(alg);
    let report = match &germ.jet {
        AnyJet::Rational(j) => codim_report(j, &germ.vars, &action, &opts, determine)?,
        AnyJet::Float(j) => codim_report(j, &germ.vars, &action, &opts, determine)?,
    };
    emit_json(out, &report)?;
    let capped = if determine {
        report.sigma.is_none()
    } else {
        report.value == CodimValue::InfiniteSuspected
    };
    if capped {
        log::warn!("cap {} reached without a certificate", alg.cap);
        return Ok(status::CAP);
    }
    Ok(status::OK)
}

#[derive(Serialize)]
struct TransversalOut {
    transversal: bool,
    minimal: bool,
    codim: usize,
    order_used: u32,
    params: Vec<String>,
    missing: Vec<String>,
}

fn transversal_report<C: Scalar>(
    base: Jet<C>,
    alphas: Vec<Jet<C>>,
    params: &[String],
    vars: &[String],
    action: &SignAction,
    opts: &AlgebraOpts,
) -> Result<TransversalOut, Failure> {
    let mut u = Unfolding::new(base, alphas).map_err(unfolding_failure)?;
    u.params = params.to_vec();
    let r = is_transversal(&u, action, opts).map_err(unfolding_failure)?;
    Ok(TransversalOut {
        transversal: r.transversal,
        minimal: r.minimal,
        codim: r.codim,
        order_used: r.order_used,
        params: params.to_vec(),
        missing: r.missing.iter().map(|m| m.render(vars)).collect(),
    })
}

pub fn transversal(path: &Path, alg: &AlgebraArgs, out: &OutArgs) -> Result<u8, Failure> {
    let doc = parse_unfolding(&read(path)?).map_err(Failure::input)?;
    let over = alg.action_spec()?.or(doc.action.clone());
    let action = doc
        .germ
        .resolve_action(over.as_ref())
        .map_err(Failure::input)?;
    let opts = algebra_opts(alg);
    let vars = &doc.germ.vars;
    let report = match &doc.germ.jet {
        AnyJet::Rational(j) => {
            let alphas = doc
                .alphas
                .iter()
                .map(|a| match a {
                    AnyJet::Rational(a) => a.clone(),
                    AnyJet::Float(_) => unreachable!("kinds checked on parse"),
                })
                .collect();
            transversal_report(j.clone(), alphas, &doc.params, vars, &action, &opts)?
        }
        AnyJet::Float(j) => {
            let alphas = doc
                .alphas
                .iter()
                .map(|a| match a {
                    AnyJet::Float(a) => a.clone(),
                    AnyJet::Rational(_) => unreachable!("kinds checked on parse"),
                })
                .collect();
            transversal_report(j.clone(), alphas, &doc.params, vars, &action, &opts)?
        }
    };
    emit_json(out, &report)?;
    Ok(status::OK)
}

#[derive(Serialize)]
struct UnfoldOut {
    codim: usize,
    params: Vec<String>,
    alphas: Vec<String>,
    unfolding: String,
    full: GermSpec,
}

fn unfold_report<C: Scalar>(
    f: &Jet<C>,
    vars: &[String],
    action: &SignAction,
    opts: &AlgebraOpts,
) -> Result<UnfoldOut, Failure> {
    let u = universal_unfolding(f, action, opts).map_err(unfolding_failure)?;
    let mut names = vars.to_vec();
    names.extend(u.params.iter().cloned());
    let full = u.full.clone().unwrap_or_else(|| u.linear_full());
    Ok(UnfoldOut {
        codim: u.r(),
        params: u.params.clone(),
        alphas: u.alphas.iter().map(|a| a.render(vars)).collect(),
        unfolding: u.render_linear(vars),
        full: GermSpec::from_jet(&names, &full),
    })
}

pub fn unfold(
    path: &Path,
    order: Option<u32>,
    alg: &AlgebraArgs,
    out: &OutArgs,
) -> Result<u8, Failure> {
    let (germ, action) = load_germ(path, order, alg)?;
    let opts = algebra_opts(alg);
    let report = match &germ.jet {
        AnyJet::Rational(j) => unfold_report(j, &germ.vars, &action, &opts)?,
        AnyJet::Float(j) => unfold_report(j, &germ.vars, &action, &opts)?,
    };
    emit_json(out, &report)?;
    Ok(status::OK)
}

/// JSON form of a classification.
#[derive(Serialize)]
pub struct ClassifyOut {
    pub corank: usize,
    pub family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub sign: &'static str,
    pub modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus_exact: Option<String>,
    pub cod_z2: Option<usize>,
    pub sigma: Option<u32>,
    pub unfolding: Option<String>,
    pub presentations: Vec<Presentation>,
    pub kernel: Vec<String>,
    pub quad_signature: Vec<i8>,
    pub normal_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub fn classification_json(r: &ClassificationResult, vars: &[String]) -> ClassifyOut {
    let nf_vars: Vec<String> = r
        .normal_form_vars()
        .iter()
        .map(|&i| vars[i].clone())
        .collect();
    ClassifyOut {
        corank: r.corank,
        family: r.family.name(),
        k: match r.family {
            Family::EvenPower { k, .. } => Some(k),
            _ => None,
        },
        sign: if r.family.sign() < 0 { "-" } else { "+" },
        modulus: r.family.modulus().map(|m| m.value()),
        modulus_exact: r
            .family
            .modulus()
            .filter(|m| m.is_exact())
            .map(|m| m.to_string()),
        cod_z2: r.cod_z2,
        sigma: r.sigma,
        unfolding: r.unfolding_string(vars),
        presentations: r.presentations.clone(),
        kernel: r.kernel.iter().map(|&i| vars[i].clone()).collect(),
        quad_signature: r.quad_signature.clone(),
        normal_form: r.normal_form.as_ref().map(|j| {
            if r.family.modulus().is_some_and(|m| !m.is_exact()) {
                j.to_float().render(&nf_vars)
            } else {
                j.render(&nf_vars)
            }
        }),
        reason: match &r.family {
            Family::BeyondTable { reason } => Some(reason.clone()),
            _ => None,
        },
    }
}

fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::NonFinite => Failure::numeric(e),
        ClassifyError::Unfolding(u) => unfolding_failure(u),
        other => Failure::input(other),
    }
}

pub fn classify(
    path: &Path,
    zero_tol: f64,
    hess_tol: f64,
    alg: &AlgebraArgs,
    out: &OutArgs,
) -> Result<u8, Failure> {
    let (germ, action) = load_germ(path, None, alg)?;
    let opts = ClassifyOpts {
        algebra: algebra_opts(alg),
        zero_tol,
        hess_tol,
    };
    let r = match &germ.jet {
        AnyJet::Rational(j) => classify_germ(j, &action, &opts),
        AnyJet::Float(j) => classify_germ(j, &action, &opts),
    }
    .map_err(classify_failure)?;
    emit_json(out, &classification_json(&r, &germ.vars))?;
    Ok(if r.family.is_beyond_table() {
        status::CAP
    } else {
        status::OK
    })
}

fn load_model(path: &Path) -> Result<ModelSpec, Failure> {
    let spec: ModelSpec =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::input(anyhow!("params: {e}")))?;
    spec.validate().map_err(Failure::input)?;
    Ok(spec)
}

fn parse_box(s: Option<&str>, spec: &ModelSpec) -> Result<Vec<(f64, f64)>, Failure> {
    let Some(s) = s else {
        return Ok(spec.default_box());
    };
    let bad = || {
        Failure::input(anyhow!(
            "--box expects lo:hi per order parameter, got `{s}`"
        ))
    };
    let bx: Vec<(f64, f64)> = s
        .split(',')
        .map(|part| {
            let (a, b) = part.split_once(':').ok_or_else(bad)?;
            let lo: f64 = a.trim().parse().map_err(|_| bad())?;
            let hi: f64 = b.trim().parse().map_err(|_| bad())?;
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(bad());
            }
            Ok((lo, hi))
        })
        .collect::<Result<_, _>>()?;
    if bx.len() != spec.as_objective().dim() {
        return Err(bad());
    }
    Ok(bx)
}

#[derive(Serialize)]
struct TransversalSummary {
    couplings: Vec<String>,
    transversal: bool,
    minimal: bool,
    missing: Vec<String>,
}

#[derive(Serialize)]
struct ClassifiedPoint {
    c: Vec<f64>,
    taylor_residual: f64,
    symmetry_warning: bool,
    classification: ClassifyOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling_unfolding: Option<TransversalSummary>,
}

#[derive(Serialize)]
struct CriticalOut {
    model: ModelSpec,
    points: Vec<CriticalPoint>,
    global_minimizer: Option<Minimizer>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    classified: Vec<ClassifiedPoint>,
}

pub fn critical(
    path: &Path,
    search_box: Option<&str>,
    tune: bool,
    classify: bool,
    degeneracy: f64,
    out: &OutArgs,
) -> Result<u8, Failure> {
    let mut spec = load_model(path)?;
    let mut tuned_point = None;
    if tune {
        match &mut spec {
            ModelSpec::Pairing(p) => {
                let t = tune_pairing(p.beta, p.h, p.mu, p.lam).map_err(Failure::numeric)?;
                *p = t.params;
                tuned_point = Some(t.point.to_vec());
            }
            ModelSpec::StrongCoupling(s) => {
                *s = tune_strong_coupling().map_err(Failure::numeric)?.model;
                tuned_point = Some(vec![0.0]);
            }
        }
    }
    let bx = parse_box(search_box, &spec)?;
    let opts = SolveOpts {
        degeneracy,
        ..SolveOpts::default()
    };
    let f = spec.as_objective();
    let mut points = find_critical_points(f, &bx, &opts);
    if let Some(c) = tuned_point {
        // Newton only converges linearly onto the tuned point; report it exactly
        points.retain(|p| {
            p.c.iter()
                .zip(&c)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                > 1e-3
        });
        points.push(annotate(f, c, &opts));
        points.sort_by(|a, b| {
            a.c[0]
                .total_cmp(&b.c[0])
                .then(a.c[a.c.len() - 1].total_cmp(&b.c[b.c.len() - 1]))
        });
    }
    if points.is_empty() {
        log::warn!("no critical point found in the search box");
    }
    let vars: Vec<String> = (1..=f.dim()).map(|i| format!("c{i}")).collect();
    let mut classified = Vec::new();
    if classify {
        let copts = ClassifyOpts::default();
        for p in points.iter().filter(|p| p.degenerate) {
            let r = classify_critical_point(f, &p.c, &copts).map_err(classify_failure)?;
            let names = default_couplings(&spec);
            let coupling_unfolding = coupling_transversality(&spec, &p.c, &names, &copts)
                .ok()
                .map(|t| TransversalSummary {
                    couplings: names.iter().map(|s| s.to_string()).collect(),
                    transversal: t.transversal,
                    minimal: t.minimal,
                    missing: t.missing.iter().map(|m| m.render(&vars)).collect(),
                });
            classified.push(ClassifiedPoint {
                c: p.c.clone(),
                taylor_residual: r.taylor.residual,
                symmetry_warning: r.taylor.warning,
                classification: classification_json(&r.classification, &vars),
                coupling_unfolding,
            });
        }
    }
    let report = CriticalOut {
        global_minimizer: global_minimizer(f, &bx, &opts),
        model: spec,
        points,
        classified,
    };
    emit_json(out, &report)?;
    Ok(status::OK)
}

pub fn phase(
    path: &Path,
    sweep: &str,
    search_box: Option<&str>,
    jobs: usize,
    summary: Option<&Path>,
    out: &OutArgs,
) -> Result<u8, Failure> {
    let spec = load_model(path)?;
    let axes = parse_sweep(sweep).map_err(Failure::input)?;
    let opts = PhaseOpts {
        box_override: Some(parse_box(search_box, &spec)?),
        ..PhaseOpts::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(Failure::numeric)?;
    let pd = pool
        .install(|| phase_diagram(&spec, axes, &opts))
        .map_err(Failure::input)?;
    emit(out, &pd.to_csv())?;
    let s = pd.summary();
    let text = serde_json::to_string_pretty(&s).map_err(|e| Failure::numeric(anyhow!(e)))? + "\n";
    let target: Option<PathBuf> = summary.map(Path::to_path_buf).or_else(|| {
        out.out.as_ref().map(|p| {
            let mut q = p.clone().into_os_string();
            q.push(".json");
            PathBuf::from(q)
        })
    });
    match target {
        Some(p) => fs::write(&p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::input)?,
        None => eprint!("{text}"),
    }
    if s.failed > 0 {
        log::warn!("{} cells failed to converge", s.failed);
    }
    Ok(status::OK)
}
