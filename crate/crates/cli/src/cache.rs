//! The persistent coefficient cache: one self-describing JSON document
//! holding the φ₁₀,₁ table, the c(h,n,m) table, and the truncation
//! certificate they were computed under.
//!
//! Loading validates the format version and convention tag (mismatch is a
//! hard error, never a silent reinterpretation) and spot-checks a few
//! seed coefficients against their known values, so a tampered file cannot
//! quietly poison downstream sums. Writes are atomic: new content goes to a
//! sibling temp file which is then renamed over the target.

use anyhow::{anyhow, bail, Context, Result};
use k3series::igusa::{seed_phi_table, IgusaTable, JacobiCoeffTable};
use k3series::rational::{rat_int, rational_from_str, rational_to_string};
use k3series::{TruncationSpec, CONVENTION_TAG, FORMAT_VERSION};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheDoc {
    pub version: u32,
    pub convention_tag: String,
    pub trunc_certificate: TruncationSpec,
    pub phi_table: PhiDoc,
    pub igusa_table: IgusaDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiDoc {
    pub a_max: i64,
    pub entries: Vec<PhiEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub a: i64,
    pub l: i64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IgusaDoc {
    pub entries: Vec<IgusaEntry>,
    pub slice_lows: Vec<SliceLow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IgusaEntry {
    pub h: i64,
    pub n: i64,
    pub m: i64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceLow {
    pub n: i64,
    pub h: i64,
    pub low: i64,
}

pub fn to_doc(table: &IgusaTable, phi: &JacobiCoeffTable) -> CacheDoc {
    CacheDoc {
        version: FORMAT_VERSION,
        convention_tag: CONVENTION_TAG.to_string(),
        trunc_certificate: *table.trunc(),
        phi_table: PhiDoc {
            a_max: phi.a_max(),
            entries: phi
                .entries()
                .map(|(&(a, l), v)| PhiEntry {
                    a,
                    l,
                    value: rational_to_string(v),
                })
                .collect(),
        },
        igusa_table: IgusaDoc {
            entries: table
                .entries()
                .map(|(&(h, n, m), v)| IgusaEntry {
                    h,
                    n,
                    m,
                    value: rational_to_string(v),
                })
                .collect(),
            slice_lows: table
                .slice_lows()
                .map(|(&(n, h), &low)| SliceLow { n, h, low })
                .collect(),
        },
    }
}

pub fn from_doc(doc: &CacheDoc) -> Result<(IgusaTable, JacobiCoeffTable)> {
    if doc.version != FORMAT_VERSION {
        bail!(
            "cache version {} does not match supported version {}",
            doc.version,
            FORMAT_VERSION
        );
    }
    if doc.convention_tag != CONVENTION_TAG {
        bail!(
            "cache convention tag {:?} does not match {:?}; refusing to reinterpret",
            doc.convention_tag,
            CONVENTION_TAG
        );
    }
    let mut phi_entries = BTreeMap::new();
    for e in &doc.phi_table.entries {
        phi_entries.insert(
            (e.a, e.l),
            rational_from_str(&e.value).map_err(|m| anyhow!("bad phi value: {m}"))?,
        );
    }
    let phi = JacobiCoeffTable::from_entries(doc.phi_table.a_max, phi_entries);
    let mut entries = BTreeMap::new();
    for e in &doc.igusa_table.entries {
        entries.insert(
            (e.h, e.n, e.m),
            rational_from_str(&e.value).map_err(|m| anyhow!("bad igusa value: {m}"))?,
        );
    }
    let slice_lows = doc
        .igusa_table
        .slice_lows
        .iter()
        .map(|s| ((s.n, s.h), s.low))
        .collect();
    let table = IgusaTable::from_parts(
        doc.trunc_certificate,
        doc.convention_tag.clone(),
        entries,
        slice_lows,
    );
    integrity_check(&table, &phi)?;
    Ok((table, phi))
}

/// Seed coefficients with known values; a cache failing these is corrupt.
fn integrity_check(table: &IgusaTable, phi: &JacobiCoeffTable) -> Result<()> {
    let phi_expect = [((1, 1), 1), ((1, 0), -2), ((2, 0), 36)];
    for ((a, l), v) in phi_expect {
        if phi.a_max() >= a && phi.coeff(a, l).ok() != Some(rat_int(v)) {
            bail!("cache integrity: phi({a},{l}) != {v}");
        }
    }
    let cert = table.trunc();
    if cert.p_window >= 1 && table.igusa_c(-1, -1, 1).ok() != Some(rat_int(1)) {
        bail!("cache integrity: c(-1,-1,1) != 1");
    }
    if cert.p_window >= 2 && table.igusa_c(-1, -1, 2).ok() != Some(rat_int(2)) {
        bail!("cache integrity: c(-1,-1,2) != 2");
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<(IgusaTable, JacobiCoeffTable)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading cache {}", path.display()))?;
    let doc: CacheDoc = serde_json::from_str(&text)
        .with_context(|| format!("cache {} is not a valid cache document", path.display()))?;
    from_doc(&doc).with_context(|| format!("cache {} failed validation", path.display()))
}

pub fn save(path: &Path, table: &IgusaTable, phi: &JacobiCoeffTable) -> Result<()> {
    let doc = to_doc(table, phi);
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &text).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming over {}", path.display()))?;
    Ok(())
}

/// Serve an IgusaTable certified for at least `needed`: reuse the cache if
/// it suffices, extend and rewrite if not, build from scratch when absent.
pub fn load_or_build(path: Option<&Path>, needed: &TruncationSpec) -> Result<IgusaTable> {
    match path {
        None => Ok(IgusaTable::build(needed)?),
        Some(p) if p.exists() => {
            let (table, phi) = load(p)?;
            seed_phi_table(phi);
            if table.trunc().contains(needed) {
                return Ok(table);
            }
            let bigger = table.extend(needed)?;
            save(p, &bigger, &working_phi(&bigger))?;
            Ok(bigger)
        }
        Some(p) => {
            let table = IgusaTable::build(needed)?;
            save(p, &table, &working_phi(&table))?;
            Ok(table)
        }
    }
}

/// The φ-table to persist alongside an igusa table: the one the lift
/// actually used (it reaches the internal enlargement range, which is what
/// makes later extensions cheap), or a minimal rebuild as a fallback.
fn working_phi(table: &IgusaTable) -> JacobiCoeffTable {
    match k3series::igusa::current_phi_table() {
        Some(phi) => (*phi).clone(),
        None => {
            let cert = table.trunc();
            JacobiCoeffTable::build(cert.q_max.max(1) * cert.t_max.max(1))
        }
    }
}
