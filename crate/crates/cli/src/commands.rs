use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bohrdisc_core::discord::{is_alice_concordant, min_discord, ConcordanceMethod};
use bohrdisc_core::measure::Povm;
use bohrdisc_core::nonlocal::{
    classify, local_model_lp, ClassifyConfig, LocalModel, SteeringOptions,
};
use bohrdisc_core::phenomena::{
    bohr_no_disturbance, epr_analog, epr_argument, epr_no_disturbance, pauli_catalog, predictable,
    BohrVerdict, LabeledPovm, Notion, Phenomenon, StepRecord, StepVerdict,
};
use bohrdisc_core::qcore::{states, CMatrix};
use serde_json::{json, Value};

use crate::files::{self, matrix_rows};
use crate::{CliError, Command, NotionArg, Output, PhenomenonAction, Settings, Side};

pub fn dispatch(cmd: &Command, s: &Settings) -> Result<Output, CliError> {
    match cmd {
        Command::Discord { state, side } => discord(state, *side, s),
        Command::Classify { state, settings } => classify_state(state, usize::from(*settings), s),
        Command::EprDemo { dim, notion } => epr_demo(usize::from(*dim), *notion),
        Command::BohrCheck {
            state,
            instrument,
            catalog,
            bob,
            recovery,
        } => bohr_check(state, instrument, catalog, bob, recovery),
        Command::Phenomenon {
            action: PhenomenonAction::Check { phenomenon },
        } => phenomenon_check(phenomenon),
        Command::LocalModel { phenomenon } => local_model(phenomenon),
    }
}

fn complex(z: bohrdisc_core::qcore::C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.4}{sign}{:.4}i", z.re, z.im.abs())
}

fn matrix_text(m: &CMatrix, indent: &str) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| complex(m[(i, j)])).collect();
        let _ = writeln!(out, "{indent}[{}]", row.join(", "));
    }
    out
}

fn method_name(m: ConcordanceMethod) -> &'static str {
    match m {
        ConcordanceMethod::Structural => "structural",
        ConcordanceMethod::OptimizerFallback => "optimizer fallback",
    }
}

fn discord(path: &Path, side: Side, s: &Settings) -> Result<Output, CliError> {
    let mut state = files::load_state(path)?;
    if side == Side::Bob {
        state = state.swapped();
    }
    let cfg = s.optimizer();
    let m = min_discord(&state, &cfg)?;
    let cert = is_alice_concordant(&state);
    let r = &m.result;
    let side_name = match side {
        Side::Alice => "alice",
        Side::Bob => "bob",
    };
    let mut text = format!(
        "I={:.4} J={:.4} discord={:.4}\n",
        r.mutual_information, r.j_value, r.discord
    );
    let _ = writeln!(text, "measured side: {side_name}");
    let _ = write!(
        text,
        "optimal basis (columns):\n{}",
        matrix_text(&m.basis, "  ")
    );
    let _ = writeln!(
        text,
        "zero discord: {} (structural residual {:.4}, {})",
        if cert.verdict { "yes" } else { "no" },
        cert.residual,
        method_name(cert.method)
    );
    let json = json!({
        "mutual_information": r.mutual_information,
        "j": r.j_value,
        "discord": r.discord,
        "side": side_name,
        "basis": matrix_rows(&m.basis),
        "converged": m.converged,
        "evaluations": m.evaluations,
        "zero_discord": cert.verdict,
        "concordance": {
            "verdict": cert.verdict,
            "residual": cert.residual,
            "method": cert.method,
            "basis": matrix_rows(&cert.basis),
        },
    });
    Ok(Output {
        text,
        json,
        negative: false,
    })
}

fn classify_state(path: &Path, settings: usize, s: &Settings) -> Result<Output, CliError> {
    let state = files::load_state(path)?;
    let cfg = ClassifyConfig {
        steering_settings: settings,
        steering: SteeringOptions {
            seed: s.seed,
            ..SteeringOptions::default()
        },
    };
    let r = classify(&state, &cfg)?;
    let mut text = String::new();
    for (name, level) in r.levels() {
        let _ = writeln!(
            text,
            "{name:<17} {:<13} {} [{}]",
            level.verdict.to_string(),
            level.witness,
            level.method
        );
    }
    let _ = writeln!(text, "mutual information: {:.4}", r.mutual_information);
    if let Some(c) = r.chsh {
        let _ = writeln!(text, "chsh: {c:.4}");
    }
    let _ = writeln!(
        text,
        "min partial-transpose eigenvalue: {:.4}",
        r.separability.min_pt_eigenvalue
    );
    let mut json = serde_json::to_value(&r).expect("report serializes");
    json["consistent"] = Value::Bool(r.is_consistent());
    Ok(Output {
        text,
        json,
        negative: false,
    })
}

fn verdict_name(v: StepVerdict) -> &'static str {
    match v {
        StepVerdict::Verified => "verified",
        StepVerdict::Failed => "failed",
        StepVerdict::NotReached => "not reached",
    }
}

const NUMERALS: [&str; 7] = ["i", "ii", "iii", "iv", "v", "vi", "vii"];

fn steps_text(out: &mut String, steps: &[StepRecord]) {
    for st in steps {
        let n = NUMERALS
            .get(usize::from(st.step).saturating_sub(1))
            .copied()
            .unwrap_or("?");
        let line = format!("  ({n:>3}) {:<11} {}", verdict_name(st.verdict), st.claim);
        let _ = writeln!(out, "{}", line.trim_end());
        if !st.evidence.is_empty() {
            let _ = writeln!(out, "        {}", st.evidence);
        }
    }
}

fn epr_demo(dim: usize, notion: NotionArg) -> Result<Output, CliError> {
    let notion = match notion {
        NotionArg::Epr => Notion::Epr,
        NotionArg::Bohr => Notion::Bohr,
    };
    let sc = epr_analog(dim, 0);
    let r = epr_argument(&sc, "q", "p", notion)?;
    let mut text = format!(
        "dimension: {dim}\nnotion: {notion}\nquantities: {}, {}\n",
        r.quantities[0], r.quantities[1]
    );
    steps_text(&mut text, &r.steps);
    text.push_str("one-observable variant:\n");
    steps_text(&mut text, &r.one_observable);
    let _ = writeln!(text, "theories: {}", r.theories.join(", "));
    let _ = writeln!(text, "conclusion: {}", r.conclusion);
    let mut json = serde_json::to_value(&r).expect("report serializes");
    json["dimension"] = json!(dim);
    json["conclusion_text"] = json!(r.conclusion.to_string());
    Ok(Output {
        text,
        json,
        negative: false,
    })
}

fn default_bob(d: usize) -> Vec<Povm> {
    if d == 2 {
        vec![Povm::sigma_x(), Povm::sigma_y(), Povm::sigma_z()]
    } else {
        vec![
            Povm::computational(d),
            Povm::projective(&states::fourier_basis(d)),
        ]
    }
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<LabeledPovm>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(files::load_measurements(p)?);
    }
    Ok(out)
}

fn bohr_check(
    state: &Path,
    instrument: &Path,
    catalog: &[PathBuf],
    bob: &[PathBuf],
    recovery: &[PathBuf],
) -> Result<Output, CliError> {
    let st = files::load_state(state)?;
    let (label, inst) = files::load_instrument(instrument)?;
    let quantities = load_all(catalog)?;
    let bob: Vec<Povm> = if bob.is_empty() {
        default_bob(st.dim_beta())
    } else {
        load_all(bob)?.into_iter().map(|m| m.povm).collect()
    };
    let recovery: Vec<Povm> = if recovery.is_empty() {
        let mut r: Vec<Povm> = quantities.iter().map(|q| q.povm.clone()).collect();
        r.push(inst.povm());
        if st.dim_alpha() == 2 {
            r.extend(pauli_catalog());
        }
        r
    } else {
        load_all(recovery)?.into_iter().map(|m| m.povm).collect()
    };
    let v = bohr_no_disturbance(&st, &inst, &quantities, &recovery, &bob)?;
    let mut text = format!("instrument: {label}\n");
    match &v {
        BohrVerdict::Nondisturbing { strategies } => {
            text.push_str("verdict: nondisturbing\n");
            for c in strategies {
                let picks: Vec<String> = c
                    .choices
                    .iter()
                    .map(|p| p.map_or("-".into(), |i| i.to_string()))
                    .collect();
                let _ = writeln!(
                    text,
                    "  {:<10} residual={:.4} follow-up per outcome [{}]",
                    c.quantity,
                    c.residual,
                    picks.join(", ")
                );
            }
        }
        BohrVerdict::Disturbing {
            residuals,
            certification,
        } => {
            text.push_str("verdict: disturbing\n");
            for q in residuals {
                let search = if q.exhaustive { "exhaustive" } else { "greedy" };
                let _ = writeln!(
                    text,
                    "  {:<10} residual={:.4} ({search})",
                    q.quantity, q.residual
                );
            }
            let _ = writeln!(
                text,
                "catalog exhausted: {}; state classical on the measured side: {} (residual {:.4})",
                certification.catalog_exhausted,
                certification.state_alice_concordant,
                certification.concordance_residual
            );
        }
    }
    let mut json = serde_json::to_value(&v).expect("verdict serializes");
    json["instrument"] = json!(label);
    Ok(Output {
        text,
        json,
        negative: v.is_disturbing(),
    })
}

fn labels(ph: &Phenomenon, alice: bool) -> Vec<String> {
    let s = if alice {
        ph.alice_settings()
    } else {
        ph.bob_settings()
    };
    s.iter().map(|x| x.label.clone()).collect()
}

fn phenomenon_check(path: &Path) -> Result<Output, CliError> {
    let ph = files::load_phenomenon(path)?;
    let (la, lb) = (labels(&ph, true), labels(&ph, false));
    let swapped = ph.swapped();
    let alice_ok: Vec<bool> = (0..la.len()).map(|a| epr_no_disturbance(&ph, a)).collect();
    let bob_ok: Vec<bool> = (0..lb.len())
        .map(|b| epr_no_disturbance(&swapped, b))
        .collect();
    let mut pairs = Vec::new();
    for (a, na) in la.iter().enumerate() {
        for (b, nb) in lb.iter().enumerate() {
            if predictable(&ph, a, b) {
                pairs.push(json!({"from": na, "to": nb, "direction": "alice_to_bob"}));
            }
            if predictable(&swapped, b, a) {
                pairs.push(json!({"from": nb, "to": na, "direction": "bob_to_alice"}));
            }
        }
    }
    let no_signalling = alice_ok.iter().chain(&bob_ok).all(|&x| x);
    let mark = |ok: bool| if ok { "ok" } else { "signals" };
    let mut text = String::new();
    for (l, &ok) in la.iter().zip(&alice_ok) {
        let _ = writeln!(text, "alice {l:<10} {}", mark(ok));
    }
    for (l, &ok) in lb.iter().zip(&bob_ok) {
        let _ = writeln!(text, "bob   {l:<10} {}", mark(ok));
    }
    if pairs.is_empty() {
        text.push_str("predictable pairs: none\n");
    } else {
        text.push_str("predictable pairs:\n");
        for p in &pairs {
            let (from, to) = if p["direction"] == "alice_to_bob" {
                ("alice", "bob")
            } else {
                ("bob", "alice")
            };
            let _ = writeln!(
                text,
                "  {from} {} -> {to} {}",
                p["from"].as_str().unwrap_or(""),
                p["to"].as_str().unwrap_or("")
            );
        }
    }
    let _ = writeln!(
        text,
        "no-signalling: {}",
        if no_signalling { "holds" } else { "violated" }
    );
    let json = json!({
        "alice": la.iter().zip(&alice_ok).map(|(l, &ok)| json!({"label": l, "no_signalling": ok})).collect::<Vec<_>>(),
        "bob": lb.iter().zip(&bob_ok).map(|(l, &ok)| json!({"label": l, "no_signalling": ok})).collect::<Vec<_>>(),
        "predictable": pairs,
        "no_signalling": no_signalling,
    });
    Ok(Output {
        text,
        json,
        negative: !no_signalling,
    })
}

fn local_model(path: &Path) -> Result<Output, CliError> {
    let ph = files::load_phenomenon(path)?;
    match local_model_lp(&ph)? {
        LocalModel::Local { theory, error } => {
            let mut text = format!(
                "local model: found ({} deterministic strategies, error {error:.4})\n",
                theory.lambdas().len()
            );
            for (l, w) in theory.lambdas().iter().zip(theory.weights()) {
                let _ = writeln!(text, "  {w:.4}  {l}");
            }
            let json = json!({
                "local": true,
                "error": error,
                "strategies": theory.lambdas().iter().zip(theory.weights()).map(|(l, w)| json!({"strategy": l, "weight": w})).collect::<Vec<_>>(),
            });
            Ok(Output {
                text,
                json,
                negative: false,
            })
        }
        LocalModel::Nonlocal(cert) => {
            let mut text = format!(
                "local model: none\nBell inequality: value {:.4} exceeds local bound {:.4} by {:.4}\ncoefficients:\n",
                cert.value,
                cert.local_bound,
                cert.violation()
            );
            let (la, lb) = (labels(&ph, true), labels(&ph, false));
            for (i, c) in cert.coefficients.iter().enumerate() {
                let row: Vec<String> = c.iter().map(|x| format!("{x:.4}")).collect();
                let _ = writeln!(
                    text,
                    "  {} {}: [{}]",
                    la[i / lb.len()],
                    lb[i % lb.len()],
                    row.join(", ")
                );
            }
            let mut json = serde_json::to_value(&cert).expect("certificate serializes");
            json["local"] = Value::Bool(false);
            Ok(Output {
                text,
                json,
                negative: true,
            })
        }
    }
}
