//! TSV serialization of pseudotrajectories.
//!
//! Layout: one header line, then one line per ball element in canonical
//! order:
//!
//! ```text
//! #shadowlab  group=BS(1,2)  gens=a,A,b,B  radius=4  dim=2  mode=exact  d=1/10
//! e   0/1    0/1
//! a   1/15   1/30
//! ...
//! ```
//!
//! (columns separated by single tabs). Interval-mode files carry
//! `mode=float:<bits>` and an extra `err=p/q` header field. Reading rebuilds
//! the ball from the header and re-indexes each line's word, so a file is
//! accepted exactly when it covers the declared ball once.

use super::{NumericMode, PseudoError, Pseudotrajectory};
use crate::action::Point;
use crate::group::{CayleyBall, GeneratingSet, GroupSpec};
use crate::numeric::{format_rational, parse_rational, Rational};
use num_traits::Zero;
use std::io::{BufRead, Write};
use std::sync::Arc;

const MAGIC: &str = "#shadowlab";

pub fn write_tsv<W: Write>(traj: &Pseudotrajectory, out: &mut W) -> Result<(), PseudoError> {
    let ball = traj.ball();
    let mode = match traj.mode() {
        NumericMode::Exact => "exact".to_string(),
        NumericMode::Interval { precision_bits } => format!("float:{precision_bits}"),
    };
    let d = traj
        .declared_d()
        .map(format_rational)
        .unwrap_or_else(|| "-".to_string());
    write!(
        out,
        "{MAGIC}\tgroup={}\tgens={}\tradius={}\tdim={}\tmode={mode}\td={d}",
        ball.spec().describe(),
        ball.gens().labels().join(","),
        ball.radius(),
        traj.dim(),
    )?;
    if !traj.err_bound().is_zero() {
        write!(out, "\terr={}", format_rational(traj.err_bound()))?;
    }
    writeln!(out)?;
    for i in 0..ball.len() {
        write!(out, "{}", ball.element(i).to_word())?;
        for c in traj.point(i).coords() {
            write!(out, "\t{}", format_rational(c))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_tsv<R: BufRead>(input: R) -> Result<Pseudotrajectory, PseudoError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| malformed(1, "missing header"))??;
    let mut fields = header.split('\t');
    if fields.next() != Some(MAGIC) {
        return Err(malformed(1, &format!("first field must be {MAGIC}")));
    }
    let mut group = None;
    let mut gens = None;
    let mut radius = None;
    let mut dim = None;
    let mut mode = None;
    let mut d = None;
    let mut err = None;
    for f in fields {
        let (key, value) = f
            .split_once('=')
            .ok_or_else(|| malformed(1, &format!("header field `{f}` lacks `=`")))?;
        match key {
            "group" => group = Some(value.to_string()),
            "gens" => gens = Some(value.to_string()),
            "radius" => {
                radius = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| malformed(1, "radius must be a nonnegative integer"))?,
                )
            }
            "dim" => {
                dim = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| malformed(1, "dim must be 1 or 2"))?,
                )
            }
            "mode" => mode = Some(value.to_string()),
            "d" => d = Some(value.to_string()),
            "err" => {
                err = Some(parse_rational(value).map_err(|e| malformed(1, &e.to_string()))?)
            }
            other => return Err(malformed(1, &format!("unknown header key `{other}`"))),
        }
    }
    let group = group.ok_or_else(|| malformed(1, "missing group="))?;
    let gens = gens.ok_or_else(|| malformed(1, "missing gens="))?;
    let radius = radius.ok_or_else(|| malformed(1, "missing radius="))?;
    let dim = dim.ok_or_else(|| malformed(1, "missing dim="))?;
    let mode_str = mode.ok_or_else(|| malformed(1, "missing mode="))?;
    let d_str = d.ok_or_else(|| malformed(1, "missing d="))?;

    let spec = GroupSpec::parse(&group)?;
    let labels: Vec<&str> = gens.split(',').collect();
    let gens = GeneratingSet::from_words(&spec, &labels)?;
    let ball = Arc::new(CayleyBall::build(&spec, &gens, radius)?);

    let mode = if mode_str == "exact" {
        NumericMode::Exact
    } else if let Some(bits) = mode_str.strip_prefix("float:") {
        NumericMode::Interval {
            precision_bits: bits
                .parse()
                .map_err(|_| malformed(1, "float precision must be an integer"))?,
        }
    } else {
        return Err(malformed(1, &format!("unknown mode `{mode_str}`")));
    };
    let declared_d = if d_str == "-" {
        None
    } else {
        Some(parse_rational(&d_str).map_err(|e| malformed(1, &e.to_string()))?)
    };
    let err_bound = err.unwrap_or_else(Rational::zero);

    let mut points: Vec<Option<Point>> = vec![None; ball.len()];
    let mut count = 0usize;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let lineno = lineno + 2;
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let word = cols.next().ok_or_else(|| malformed(lineno, "empty line"))?;
        let elem = spec.parse_word(word)?;
        let idx = ball
            .index_of(&elem)
            .ok_or_else(|| malformed(lineno, &format!("`{word}` lies outside the declared ball")))?;
        if points[idx].is_some() {
            return Err(malformed(lineno, &format!("duplicate element `{word}`")));
        }
        let coords: Vec<Rational> = cols
            .map(|c| parse_rational(c).map_err(|e| malformed(lineno, &e.to_string())))
            .collect::<Result<_, _>>()?;
        if coords.len() != dim {
            return Err(malformed(
                lineno,
                &format!("expected {dim} coordinates, found {}", coords.len()),
            ));
        }
        points[idx] = Some(Point::new(coords));
        count += 1;
    }
    if count != ball.len() {
        return Err(malformed(
            0,
            &format!("file covers {count} of {} ball elements", ball.len()),
        ));
    }
    let points = points.into_iter().map(|p| p.expect("counted")).collect();
    Pseudotrajectory::from_points(ball, points, mode, declared_d, err_bound)
}

pub fn write_tsv_file(
    traj: &Pseudotrajectory,
    path: &std::path::Path,
) -> Result<(), PseudoError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_tsv(traj, &mut f)
}

pub fn read_tsv_file(path: &std::path::Path) -> Result<Pseudotrajectory, PseudoError> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_tsv(f)
}

fn malformed(line: usize, msg: &str) -> PseudoError {
    PseudoError::Malformed {
        line,
        msg: msg.to_string(),
    }
}
