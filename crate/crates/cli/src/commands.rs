use std::io::{self, Write};
use std::ops::RangeInclusive;

use clap::{Args, ValueEnum};
use kfermion::coherent::{eigenstate_check, resolve_identity, Convention, IdentityRecord, Variant};
use kfermion::expr::{eval_matrix, normal_order, parse, word_to_string, ExprError};
use kfermion::fock::{adjoint_check, verify_relations};
use kfermion::grassmann::realization_check;
use kfermion::limits::{factorization_check, ratio_limits, write_csv, EpsSchedule, LimitError};
use kfermion::matrix::Matrix;
use kfermion::{RelationCheck, Report};
use serde::Serialize;

use crate::output::write_json;
use crate::{Format, Status, MAX_K};

fn parse_k(text: &str) -> Result<u32, String> {
    let k: u32 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a nonnegative integer"))?;
    if !(2..=MAX_K).contains(&k) {
        return Err(format!("k must lie in 2..={MAX_K}, got {k}"));
    }
    Ok(k)
}

/// `5`, `2..8` or `2..=8`; both range spellings include the upper end.
fn parse_k_range(text: &str) -> Result<RangeInclusive<u32>, String> {
    let Some((lo, hi)) = text.split_once("..") else {
        let k = parse_k(text)?;
        return Ok(k..=k);
    };
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let (lo, hi) = (parse_k(lo)?, parse_k(hi)?);
    if lo > hi {
        return Err(format!("empty range {text}"));
    }
    Ok(lo..=hi)
}

fn parse_identity_k(text: &str) -> Result<u32, String> {
    let k = parse_k(text)?;
    if k > 6 {
        return Err(format!("the convention sweep supports k in 2..=6, got {k}"));
    }
    Ok(k)
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Single k or inclusive range such as 2..8.
    #[arg(long, value_parser = parse_k_range)]
    k: RangeInclusive<u32>,
}

#[derive(Serialize)]
struct VerifyEntry {
    k: u32,
    all_hold: bool,
    relations: Vec<RelationCheck>,
    adjoint: Vec<RelationCheck>,
    grassmann: Vec<RelationCheck>,
    coherent: Vec<RelationCheck>,
}

impl VerifyEntry {
    fn compute(k: u32) -> Self {
        let reports = [
            verify_relations(k),
            adjoint_check(k),
            realization_check(k),
            eigenstate_check(k),
        ];
        let all_hold = reports.iter().all(Report::all_hold);
        let [relations, adjoint, grassmann, coherent] = reports.map(|r| r.checks);
        VerifyEntry {
            k,
            all_hold,
            relations,
            adjoint,
            grassmann,
            coherent,
        }
    }

    fn groups(&self) -> [(&'static str, &[RelationCheck]); 4] {
        [
            ("relations", &self.relations),
            ("adjoint", &self.adjoint),
            ("grassmann", &self.grassmann),
            ("coherent", &self.coherent),
        ]
    }
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    all_hold: bool,
    results: &'a [VerifyEntry],
}

fn witness_text(c: &RelationCheck) -> String {
    c.witness.map(|(r, col)| format!("({r},{col})")).unwrap_or_default()
}

pub fn verify(args: &VerifyArgs, format: Format, out: &mut impl Write) -> io::Result<Status> {
    let results: Vec<VerifyEntry> = args.k.clone().map(VerifyEntry::compute).collect();
    let all_hold = results.iter().all(|e| e.all_hold);
    match format {
        Format::Json => write_json(
            out,
            &VerifyDoc {
                all_hold,
                results: &results,
            },
        )?,
        Format::Csv => {
            writeln!(out, "k,group,label,holds,witness")?;
            for e in &results {
                for (group, checks) in e.groups() {
                    for c in checks {
                        writeln!(out, "{},{group},\"{}\",{},{}", e.k, c.label, c.holds, witness_text(c))?;
                    }
                }
            }
        }
        Format::Text => {
            let Some(first) = results.first() else {
                return Ok(Status::Usage);
            };
            let width = first
                .groups()
                .iter()
                .flat_map(|(g, cs)| cs.iter().map(move |c| g.len() + c.label.len() + 2))
                .max()
                .unwrap_or(0);
            write!(out, "{:width$}", "")?;
            for e in &results {
                write!(out, "  {:>5}", format!("k={}", e.k))?;
            }
            writeln!(out)?;
            for (gi, (group, checks)) in first.groups().iter().enumerate() {
                for (ci, c) in checks.iter().enumerate() {
                    write!(out, "{:width$}", format!("{group}: {}", c.label))?;
                    for e in &results {
                        let holds = e.groups()[gi].1[ci].holds;
                        write!(out, "  {:>5}", if holds { "ok" } else { "FAIL" })?;
                    }
                    writeln!(out)?;
                }
            }
            for e in &results {
                for (group, checks) in e.groups() {
                    for c in checks.iter().filter(|c| !c.holds) {
                        writeln!(
                            out,
                            "k={} {group} `{}` first differs at {}",
                            e.k,
                            c.label,
                            witness_text(c)
                        )?;
                    }
                }
            }
            writeln!(
                out,
                "{}",
                if all_hold {
                    "all checks hold"
                } else {
                    "some checks fail"
                }
            )?;
        }
    }
    Ok(if all_hold { Status::Success } else { Status::Failure })
}

// -------------------------------------------------------------- identity

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Z,
    Zbar,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Z => Variant::Z,
            VariantArg::Zbar => Variant::Zbar,
        }
    }
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long, value_parser = parse_identity_k)]
    k: u32,
    /// Convention id such as zfirst-written-right, or `classical`.
    #[arg(long)]
    convention: Option<String>,
    /// Which coherent state to resolve when a convention is given.
    #[arg(long, value_enum, default_value = "z")]
    variant: VariantArg,
}

#[derive(Serialize)]
struct SingleConvention {
    k: u32,
    variant: Variant,
    convention: Convention,
    passes: bool,
    first_difference: Option<(usize, usize)>,
}

pub fn identity(args: &IdentityArgs, format: Format, out: &mut impl Write) -> io::Result<Status> {
    let k = args.k;
    let Some(id) = &args.convention else {
        let record = IdentityRecord::compute(k);
        match format {
            Format::Json => write_json(out, &record)?,
            Format::Csv => {
                writeln!(out, "k,variant,convention,passes")?;
                for (variant, passing) in [
                    ("z", &record.passing_conventions),
                    ("zbar", &record.conjugate_passing_conventions),
                ] {
                    for c in Convention::all() {
                        writeln!(out, "{k},{variant},{c},{}", passing.contains(&c))?;
                    }
                }
            }
            Format::Text => {
                let list = |cs: &[Convention]| {
                    if cs.is_empty() {
                        "(none)".to_string()
                    } else {
                        cs.iter().map(Convention::id).collect::<Vec<_>>().join(", ")
                    }
                };
                writeln!(out, "k={k}")?;
                writeln!(
                    out,
                    "passing conventions for |z):    {}",
                    list(&record.passing_conventions)
                )?;
                writeln!(
                    out,
                    "passing conventions for |zbar): {}",
                    list(&record.conjugate_passing_conventions)
                )?;
                writeln!(out, "mu coefficients: {}", record.mu_coefficients.join(", "))?;
            }
        }
        return Ok(if record.passing_conventions.is_empty() {
            Status::Failure
        } else {
            Status::Success
        });
    };

    let convention: Convention = match id.parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            let ids: Vec<String> = Convention::all().iter().map(Convention::id).collect();
            eprintln!("known conventions: classical, {}", ids.join(", "));
            return Ok(Status::Usage);
        }
    };
    let variant = Variant::from(args.variant);
    let res = resolve_identity(k, variant, convention);
    let doc = SingleConvention {
        k,
        variant,
        convention,
        passes: res.passes,
        first_difference: res.matrix.first_difference(&Matrix::identity(k, k as usize)),
    };
    match format {
        Format::Json => write_json(out, &doc)?,
        Format::Csv => {
            writeln!(out, "k,variant,convention,passes")?;
            writeln!(out, "{k},{variant:?},{convention},{}", doc.passes)?;
        }
        Format::Text => match doc.first_difference {
            None => writeln!(out, "k={k} {variant:?} {convention}: resolution of identity holds")?,
            Some((i, j)) => writeln!(
                out,
                "k={k} {variant:?} {convention}: fails, entry ({i},{j}) = {}",
                res.matrix.get(i, j)
            )?,
        },
    }
    Ok(if doc.passes { Status::Success } else { Status::Failure })
}

// ----------------------------------------------------------------- limit

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, value_parser = parse_k)]
    k: u32,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    s: u32,
    /// Strictly decreasing positive ε values.
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
    eps: Vec<f64>,
}

pub fn limit(args: &LimitArgs, format: Format, out: &mut impl Write) -> io::Result<Status> {
    let tables = EpsSchedule::new(args.eps.clone()).and_then(|schedule| {
        let mut tables = ratio_limits(args.k, args.r, args.s, &schedule)?;
        tables.push(factorization_check(args.k, args.r, args.s, &schedule)?);
        Ok(tables)
    });
    let tables = match tables {
        Ok(t) => t,
        Err(e @ LimitError::Range(_)) => {
            eprintln!("error: {e}");
            return Ok(Status::Range);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(Status::Usage);
        }
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                passes: bool,
                tables: &'a [kfermion::limits::ConvergenceTable],
            }
            let passes = tables.iter().all(|t| t.passes());
            write_json(
                out,
                &Doc {
                    passes,
                    tables: &tables,
                },
            )?;
        }
        Format::Csv | Format::Text => write_csv(&tables, &mut *out)?,
    }
    Ok(if tables.iter().all(|t| t.passes()) {
        Status::Success
    } else {
        Status::Failure
    })
}

// ------------------------------------------------------------- normalize

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Expression such as "am*ap - q*ap*am".
    expr: String,
    #[arg(long, value_parser = parse_k)]
    k: u32,
}

#[derive(Serialize)]
struct WordTerm {
    coefficient: String,
    word: String,
}

#[derive(Serialize)]
struct NormalizeDoc<'a> {
    input: &'a str,
    k: u32,
    normal_form: String,
    terms: Vec<WordTerm>,
    residuals: Vec<WordTerm>,
    steps: usize,
    oracle_agrees: bool,
}

fn report_parse_error(text: &str, e: &ExprError) {
    eprintln!("error: {e}");
    if let Some(pos) = e.position() {
        eprintln!("  {text}");
        eprintln!("  {}^", " ".repeat(text[..pos.min(text.len())].chars().count()));
    }
}

pub fn normalize(args: &NormalizeArgs, format: Format, out: &mut impl Write) -> io::Result<Status> {
    let k = args.k;
    let ast = match parse(&args.expr) {
        Ok(a) => a,
        Err(e) => {
            report_parse_error(&args.expr, &e);
            return Ok(Status::Usage);
        }
    };
    let nf = match normal_order(&ast, k) {
        Ok(nf) => nf,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(Status::Failure);
        }
    };
    let agrees = nf.eval_matrix() == eval_matrix(&ast, k);
    let terms = |list: &[(kfermion::Cyclotomic, Vec<kfermion::Generator>)]| {
        list.iter()
            .map(|(c, w)| WordTerm {
                coefficient: c.to_string(),
                word: word_to_string(w),
            })
            .collect::<Vec<_>>()
    };
    let doc = NormalizeDoc {
        input: &args.expr,
        k,
        normal_form: nf.to_string(),
        terms: terms(nf.terms()),
        residuals: terms(nf.residuals()),
        steps: nf.steps(),
        oracle_agrees: agrees,
    };
    match format {
        Format::Json => write_json(out, &doc)?,
        Format::Csv => {
            writeln!(out, "kind,coefficient,word")?;
            for (kind, list) in [("term", &doc.terms), ("residual", &doc.residuals)] {
                for t in list {
                    writeln!(out, "{kind},\"{}\",{}", t.coefficient, t.word)?;
                }
            }
        }
        Format::Text => {
            writeln!(out, "{}", doc.normal_form)?;
            if doc.residuals.is_empty() {
                writeln!(out, "residual crossings: none")?;
            } else {
                let words: Vec<&str> = doc.residuals.iter().map(|t| t.word.as_str()).collect();
                writeln!(out, "residual crossings: {}", words.join(", "))?;
            }
            writeln!(
                out,
                "matrix oracle (k={k}): {}",
                if agrees { "agrees" } else { "DISAGREES" }
            )?;
        }
    }
    Ok(if agrees { Status::Success } else { Status::Failure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("2..8").unwrap(), 2..=8);
        assert_eq!(parse_k_range("2..=8").unwrap(), 2..=8);
        assert_eq!(parse_k_range("5").unwrap(), 5..=5);
        assert!(parse_k_range("1").is_err());
        assert!(parse_k_range("8..2").is_err());
        assert!(parse_k_range("x..3").is_err());
        assert!(parse_k_range("2..65").is_err());
    }

    #[test]
    fn identity_k_is_bounded() {
        assert!(parse_identity_k("6").is_ok());
        assert!(parse_identity_k("7").is_err());
    }
}
