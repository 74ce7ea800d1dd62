//! The JSON distribution file format.
//!
//! ```json
//! {
//!   "alphabet": [{"symbol": "x", "side": "L"}, {"symbol": "y", "side": "R"}],
//!   "degree": 6,
//!   "flags": {"tracial": false, "star_symmetric": false, "sparse": true},
//!   "moments": {"x x* y": [1, 2, 0, 1]}
//! }
//! ```
//!
//! Scalars are `[re_num, re_den, im_num, im_den]` integer quadruples; the
//! loader normalizes fractions and rejects zero denominators. Unless the
//! `sparse` flag is set, every word up to the degree cap must be present.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::distribution::{Flags, MomentTable};
use crate::error::{Error, Result};
use crate::ncpoly::Alphabet;
use crate::partitions::Side;
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolDecl {
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileFlags {
    #[serde(default)]
    pub tracial: bool,
    #[serde(default)]
    pub star_symmetric: bool,
    #[serde(default)]
    pub sparse: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub alphabet: Vec<SymbolDecl>,
    pub degree: usize,
    pub flags: FileFlags,
    pub moments: BTreeMap<String, [i64; 4]>,
}

fn parse_side(decl: &SymbolDecl) -> Result<Option<Side>> {
    match decl.side.as_deref() {
        None => Ok(None),
        Some("L") | Some("l") => Ok(Some(Side::Left)),
        Some("R") | Some("r") => Ok(Some(Side::Right)),
        Some(other) => Err(Error::Parse {
            at: format!("symbol `{}`", decl.symbol),
            msg: format!("side must be \"L\" or \"R\", got `{other}`"),
        }),
    }
}

impl DistributionFile {
    pub fn into_table(self) -> Result<MomentTable<GaussianRational>> {
        let symbols = self
            .alphabet
            .iter()
            .map(|d| Ok((d.symbol.clone(), parse_side(d)?)))
            .collect::<Result<Vec<_>>>()?;
        let alphabet = Alphabet::new(symbols)?;
        let mut moments = HashMap::new();
        for (key, [rn, rd, im_n, im_d]) in &self.moments {
            let word = alphabet.parse_word(key).map_err(|e| Error::Parse {
                at: format!("moment key `{key}`"),
                msg: e.to_string(),
            })?;
            if word.is_empty() {
                return Err(Error::Parse {
                    at: format!("moment key `{key}`"),
                    msg: "the unit moment is fixed to 1 and cannot be stored".into(),
                });
            }
            let value = GaussianRational::from_parts(*rn, *rd, *im_n, *im_d)?;
            moments.insert(word, value);
        }
        let flags = Flags {
            tracial: self.flags.tracial,
            star_symmetric: self.flags.star_symmetric,
            sparse: self.flags.sparse,
        };
        MomentTable::from_explicit(alphabet, self.degree, flags, moments)
    }

    pub fn from_table(table: &MomentTable<GaussianRational>) -> Result<DistributionFile> {
        let materialized = table.materialize()?;
        let alphabet = materialized.alphabet();
        let decls = alphabet
            .symbols()
            .map(|(name, side)| SymbolDecl {
                symbol: name.to_string(),
                side: side.map(|s| s.to_string()),
            })
            .collect();
        let mut moments = BTreeMap::new();
        for w in materialized.words_up_to(materialized.degree()) {
            let v = materialized.phi(&w)?;
            if v.is_zero() {
                continue;
            }
            moments.insert(alphabet.format_word(&w), encode_scalar(&v)?);
        }
        Ok(DistributionFile {
            alphabet: decls,
            degree: materialized.degree(),
            flags: FileFlags {
                tracial: table.flags().tracial,
                star_symmetric: table.flags().star_symmetric,
                sparse: true,
            },
            moments,
        })
    }
}

fn encode_scalar(v: &GaussianRational) -> Result<[i64; 4]> {
    let part = |r: &num_rational::BigRational| -> Result<(i64, i64)> {
        let n = r.numer().to_i64();
        let d = r.denom().to_i64();
        match (n, d) {
            (Some(n), Some(d)) => Ok((n, d)),
            _ => Err(Error::Size(format!(
                "scalar {v} does not fit the 64-bit file encoding"
            ))),
        }
    };
    let (rn, rd) = part(v.re())?;
    let (im_n, im_d) = part(v.im())?;
    // keep denominators positive in files
    debug_assert!(!v.re().denom().is_negative() && !v.im().denom().is_negative());
    Ok([rn, rd, im_n, im_d])
}

/// Load a distribution file, validating totality and any set flags.
pub fn load_distribution(path: &Path) -> Result<MomentTable<GaussianRational>> {
    let text = std::fs::read_to_string(path)?;
    let file: DistributionFile = serde_json::from_str(&text)?;
    file.into_table()
}

/// Write a table as a sparse distribution file with sorted keys.
pub fn save_distribution(path: &Path, table: &MomentTable<GaussianRational>) -> Result<()> {
    let file = DistributionFile::from_table(table)?;
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
