use std::io::Write;
use std::path::PathBuf;

use icdc_core::formats::write_comment_header;
use icdc_core::losses::{
    adapted_global_loss, ap_approx, ap_kappa_loss, cosim_loss, exact_ap, peakiness_loss, DescriptorRanking, DomainPair,
    GradientPath, HeatmapSamples, ReliabilityInputs,
};

use crate::error::{CliError, CliResult};
use crate::run::{read_text, write_file, Run};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum LossKind {
    Cosim,
    Peakiness,
    ApKappa,
    ApApprox,
    Global,
}

pub struct LossArgs {
    pub kind: LossKind,
    pub input: PathBuf,
    pub patch: usize,
    pub out: Option<PathBuf>,
}

/// Data rows of a CSV: comments and blank lines skipped, fields trimmed.
fn rows(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split(',').map(str::trim).collect()))
        .collect()
}

/// Rows after a required header, each with exactly the header's width.
fn table<'a>(text: &'a str, header: &[&str]) -> CliResult<Vec<(usize, Vec<&'a str>)>> {
    let mut it = rows(text).into_iter();
    match it.next() {
        Some((_, h)) if h == header => {}
        _ => return Err(CliError::data(format!("expected header {}", header.join(",")))),
    }
    it.map(|(line, r)| {
        if r.len() == header.len() {
            Ok((line, r))
        } else {
            Err(CliError::data(format!("line {line}: expected {} fields, got {}", header.len(), r.len())))
        }
    })
    .collect()
}

fn num(line: usize, tok: &str) -> CliResult<f64> {
    tok.parse().map_err(|_| CliError::data(format!("line {line}: not a number: {tok:?}")))
}

fn column(t: &[(usize, Vec<&str>)], k: usize) -> CliResult<Vec<f64>> {
    t.iter().map(|(line, r)| num(*line, r[k])).collect()
}

type Row = (String, String, String);

fn scalar(name: &str, v: f64) -> Row {
    (name.into(), String::new(), v.to_string())
}

fn vector(name: &str, v: &[f64]) -> Vec<Row> {
    v.iter().enumerate().map(|(i, x)| (name.into(), i.to_string(), x.to_string())).collect()
}

fn path_name(p: GradientPath) -> String {
    match p {
        GradientPath::Open => "open".into(),
        GradientPath::Closed => "closed".into(),
    }
}

fn evaluate(run: &Run, args: &LossArgs, text: &str) -> CliResult<Vec<Row>> {
    let lc = &run.cfg.losses;
    let loss_err = |e: icdc_core::losses::LossError| CliError::data(e);
    let mut out = Vec::new();
    match args.kind {
        LossKind::Cosim => {
            let t = table(text, &["s", "s_prime"])?;
            let h = HeatmapSamples::new(column(&t, 0)?, column(&t, 1)?).map_err(loss_err)?;
            let l = cosim_loss(&h).map_err(|e| CliError::Numerical(e.to_string()))?;
            out.push(scalar("loss", l.value));
            out.extend(vector("grad_s", &l.grad_s));
            out.extend(vector("grad_s_prime", &l.grad_s_prime));
        }
        LossKind::Peakiness => {
            let grid = rows(text);
            let width = grid.first().map_or(0, |(_, r)| r.len());
            let mut values = Vec::new();
            for (line, r) in &grid {
                if r.len() != width {
                    return Err(CliError::data(format!("line {line}: ragged grid row")));
                }
                for tok in r {
                    values.push(num(*line, tok)?);
                }
            }
            let v = peakiness_loss(&values, width, grid.len(), args.patch).map_err(loss_err)?;
            out.push(scalar("loss", v));
        }
        LossKind::ApKappa => {
            let t = table(text, &["ap", "r"])?;
            let inp = ReliabilityInputs::new(column(&t, 0)?, column(&t, 1)?, lc.kappa).map_err(loss_err)?;
            let l = ap_kappa_loss(&inp);
            out.push(scalar("mean", l.mean));
            out.extend(vector("per_point", &l.per_point));
            out.extend(vector("grad_ap", &l.grad_ap));
            out.extend(vector("grad_r", &l.grad_r));
        }
        LossKind::ApApprox => {
            let t = table(text, &["similarity", "label"])?;
            let (mut positive, mut negatives) = (Vec::new(), Vec::new());
            for (line, r) in &t {
                let s = num(*line, r[0])?;
                match r[1] {
                    "1" => positive.push(s),
                    "0" => negatives.push(s),
                    other => return Err(CliError::data(format!("line {line}: label must be 0 or 1, got {other:?}"))),
                }
            }
            let [p] = positive[..] else {
                return Err(CliError::data(format!("expected exactly one positive, got {}", positive.len())));
            };
            let rank = DescriptorRanking::new(p, negatives).map_err(loss_err)?;
            out.push(scalar("ap_approx", ap_approx(&rank, lc.bins).map_err(loss_err)?));
            out.push(scalar("exact_ap", exact_ap(&rank)));
        }
        LossKind::Global => {
            let t = table(text, &["rep", "rel", "d", "d_prime"])?;
            for (i, (line, r)) in t.iter().enumerate() {
                let g = adapted_global_loss(num(*line, r[0])?, num(*line, r[1])?, &DomainPair::new(r[2], r[3]));
                out.push(("value".into(), i.to_string(), g.value.to_string()));
                out.push(("repeatability_path".into(), i.to_string(), path_name(g.repeatability)));
                out.push(("reliability_path".into(), i.to_string(), path_name(g.reliability_output)));
            }
        }
    }
    Ok(out)
}

fn emit<W: Write>(w: &mut W, header: &[String], rows: &[Row]) -> std::io::Result<()> {
    write_comment_header(w, header)?;
    writeln!(w, "quantity,index,value")?;
    for (q, i, v) in rows {
        writeln!(w, "{q},{i},{v}")?;
    }
    Ok(())
}

/// Evaluates one loss kernel on CSV input and prints values and gradients
/// as `quantity,index,value` rows.
pub fn eval(run: &Run, args: &LossArgs) -> CliResult<()> {
    let text = read_text(&args.input)?;
    let rows = evaluate(run, args, &text)?;
    let header = run.header();
    if let Some(out) = &args.out {
        write_file(out, |w| emit(w, &header, &rows))?;
    }
    emit(&mut std::io::stdout().lock(), &header, &rows).map_err(|e| CliError::data(format!("stdout: {e}")))
}
