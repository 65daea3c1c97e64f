//! Linear actions as data: a small JSON descriptor mapping each defining
//! generator to a rational matrix, plus the built-in actions the experiments
//! use.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use shadowlab_core::action::{LinearAction, RationalMatrix};
use shadowlab_core::group::GroupSpec;
use shadowlab_core::numeric::{parse_rational, rat, rat_i64, Rational};

/// On-disk form: `{"group": "BS(1,2)", "matrices": [[["1","0"],["1","1"]], ...]}`
/// with one row-major matrix per defining generator, entries as rationals.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionFile {
    group: String,
    matrices: Vec<Vec<Vec<String>>>,
}

pub fn load_action(path: &Path) -> Result<LinearAction> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading action file {}", path.display()))?;
    let file: ActionFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing action file {}", path.display()))?;
    let spec = GroupSpec::parse(&file.group)?;
    let mut mats = Vec::with_capacity(file.matrices.len());
    for (gi, rows) in file.matrices.iter().enumerate() {
        let dim = rows.len();
        let mut entries: Vec<Rational> = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                bail!("matrix {gi} is not square");
            }
            for e in row {
                entries.push(
                    parse_rational(e).with_context(|| format!("matrix {gi} entry `{e}`"))?,
                );
            }
        }
        mats.push(RationalMatrix::new(dim, entries)?);
    }
    Ok(LinearAction::load(&spec, mats)?)
}

/// The skew action on the plane for BS(1,n): a shears along the second
/// coordinate, b scales by (lambda, n lambda). The second entry keeps the
/// defining relation b a = a^n b satisfied for every rational lambda.
pub fn bs_skew_action(n: u32, lambda: &Rational) -> Result<LinearAction> {
    let spec = GroupSpec::parse(&format!("BS(1,{n})"))?;
    let a = RationalMatrix::from_rows_2([
        [rat_i64(1), rat_i64(0)],
        [rat_i64(1), rat_i64(1)],
    ])?;
    let b = RationalMatrix::diagonal(&[
        lambda.clone(),
        rat_i64(i64::from(n)) * lambda,
    ])?;
    Ok(LinearAction::load(&spec, vec![a, b])?)
}

/// F(2) with an expansive saddle on the first generator and a shear on the
/// second.
pub fn free_saddle_shear() -> Result<LinearAction> {
    let spec = GroupSpec::parse("F(2)")?;
    let a = RationalMatrix::diagonal(&[rat_i64(2), rat(1, 2)])?;
    let b = RationalMatrix::from_rows_2([
        [rat_i64(1), rat_i64(0)],
        [rat_i64(1), rat_i64(1)],
    ])?;
    Ok(LinearAction::load(&spec, vec![a, b])?)
}

/// F(2) with a parabolic shear on the first generator (a single map with no
/// shadowing of its own) and a saddle on the second.
pub fn free_shear_saddle() -> Result<LinearAction> {
    let spec = GroupSpec::parse("F(2)")?;
    let a = RationalMatrix::from_rows_2([
        [rat_i64(1), rat_i64(0)],
        [rat_i64(1), rat_i64(1)],
    ])?;
    let b = RationalMatrix::diagonal(&[rat_i64(2), rat(1, 2)])?;
    Ok(LinearAction::load(&spec, vec![a, b])?)
}

/// Z^2 by commuting saddles diag(2, 1/2) and diag(3, 1/3).
pub fn plane_saddles() -> Result<LinearAction> {
    let spec = GroupSpec::parse("Z^2")?;
    let a = RationalMatrix::diagonal(&[rat_i64(2), rat(1, 2)])?;
    let b = RationalMatrix::diagonal(&[rat_i64(3), rat(1, 3)])?;
    Ok(LinearAction::load(&spec, vec![a, b])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_actions_satisfy_their_relations() {
        bs_skew_action(2, &rat_i64(2)).unwrap();
        bs_skew_action(2, &rat_i64(3)).unwrap();
        bs_skew_action(3, &rat(7, 2)).unwrap();
        free_saddle_shear().unwrap();
        free_shear_saddle().unwrap();
        plane_saddles().unwrap();
    }

    #[test]
    fn action_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("action.json");
        std::fs::write(
            &path,
            r#"{"group": "BS(1,2)",
                "matrices": [[["1","0"],["1","1"]], [["2","0"],["0","4"]]]}"#,
        )
        .unwrap();
        let action = load_action(&path).unwrap();
        assert_eq!(action.dim(), 2);
        assert_eq!(*action.lipschitz(), rat_i64(4));
    }

    #[test]
    fn action_file_rejects_broken_relations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("action.json");
        std::fs::write(
            &path,
            r#"{"group": "BS(1,2)",
                "matrices": [[["1","0"],["1","1"]], [["3","0"],["0","4"]]]}"#,
        )
        .unwrap();
        assert!(load_action(&path).is_err());
    }
}
