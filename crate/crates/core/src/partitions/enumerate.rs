//! Enumeration of partition families and compact cached tables for the
//! transform hot paths.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::partitions::{ChiMap, SetPartition};

/// Hard cap on raw enumeration size (Bell(12) is about 4.2 million).
pub const ENUMERATION_CAP: usize = 12;

pub fn bell_number(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

pub fn catalan_number(n: usize) -> u64 {
    let mut c = 1u64;
    for i in 0..n {
        c = c * 2 * (2 * i as u64 + 1) / (i as u64 + 2);
    }
    c
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Size("n must be at least 1".into()));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::Size(format!(
            "n = {n} exceeds the enumeration cap {ENUMERATION_CAP}"
        )));
    }
    Ok(())
}

/// All partitions of `{1..n}` in lexicographic order of their
/// restricted-growth strings. The count is Bell(n).
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    check_cap(n)?;
    let mut out = Vec::with_capacity(bell_number(n) as usize);
    let mut rgs = vec![0usize; n];
    loop {
        out.push(SetPartition::from_rgs(&rgs)?);
        // next RGS in lexicographic order
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// All interval partitions of `{1..n}`: one per composition of `n`, ordered
/// by the cut bitmask. The count is `2^(n-1)`.
pub fn enumerate_interval_partitions(n: usize) -> Result<Vec<SetPartition>> {
    check_cap(n)?;
    let mut out = Vec::with_capacity(1 << (n - 1));
    for cuts in 0u32..(1 << (n - 1)) {
        let mut blocks = Vec::new();
        let mut cur = vec![0usize];
        for i in 1..n {
            if cuts & (1 << (i - 1)) != 0 {
                blocks.push(std::mem::take(&mut cur));
            }
            cur.push(i);
        }
        blocks.push(cur);
        out.push(SetPartition::new(n, blocks)?);
    }
    Ok(out)
}

/// Raw non-crossing partitions of a length-`len` segment, block elements
/// 0-based, in a fixed recursive enumeration order.
fn nc_blocks_raw(len: usize) -> Arc<Vec<Vec<Vec<u8>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Vec<Vec<u8>>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&len) {
        return hit.clone();
    }
    let result: Vec<Vec<Vec<u8>>> = if len == 0 {
        vec![vec![]]
    } else {
        let mut out = Vec::new();
        // choose the block of element 0 as a subset of {1..len-1}, then fill
        // every gap segment independently
        for mask in 0u32..(1 << (len - 1)) {
            let mut first_block = vec![0u8];
            for i in 1..len {
                if mask & (1 << (i - 1)) != 0 {
                    first_block.push(i as u8);
                }
            }
            // gap segments strictly between consecutive chosen elements, plus
            // the tail after the last one
            let mut segments: Vec<(usize, usize)> = Vec::new();
            for w in first_block.windows(2) {
                segments.push((w[0] as usize + 1, w[1] as usize));
            }
            segments.push((*first_block.last().unwrap() as usize + 1, len));
            let mut partials: Vec<Vec<Vec<u8>>> = vec![vec![first_block]];
            for &(lo, hi) in &segments {
                if lo >= hi {
                    continue;
                }
                let inner = nc_blocks_raw(hi - lo);
                let mut next = Vec::with_capacity(partials.len() * inner.len());
                for base in &partials {
                    for sub in inner.iter() {
                        let mut ext = base.clone();
                        for block in sub {
                            ext.push(block.iter().map(|&e| e + lo as u8).collect());
                        }
                        next.push(ext);
                    }
                }
                partials = next;
            }
            out.extend(partials);
        }
        out
    };
    let arc = Arc::new(result);
    cache
        .lock()
        .unwrap()
        .entry(len)
        .or_insert_with(|| arc.clone())
        .clone()
}

/// Non-crossing partitions of `{1..n}`; count is Catalan(n).
pub fn enumerate_noncrossing(n: usize) -> Result<Vec<SetPartition>> {
    check_cap(n)?;
    nc_blocks_raw(n)
        .iter()
        .map(|blocks| {
            SetPartition::new(n, blocks.iter().map(|b| b.iter().map(|&e| e as usize).collect()).collect())
        })
        .collect()
}

/// `BNC(chi)`: images of the non-crossing partitions under `s_chi`, in the
/// same order as [`enumerate_noncrossing`].
pub fn enumerate_bnc(chi: &ChiMap) -> Result<Vec<SetPartition>> {
    enumerate_noncrossing(chi.len())?
        .into_iter()
        .map(|p| p.image_under_s(chi))
        .collect()
}

/// `BI(chi)`: images of the interval partitions under `s_chi`.
pub fn enumerate_bi(chi: &ChiMap) -> Result<Vec<SetPartition>> {
    enumerate_interval_partitions(chi.len())?
        .into_iter()
        .map(|p| p.image_under_s(chi))
        .collect()
}

/// Flat, cache-friendly list of partitions used by the transform loops.
///
/// Blocks hold natural positions sorted ascending. `block_masks` carries the
/// same blocks as bitmasks for memoized sub-word lookups.
pub struct PartitionTable {
    n: usize,
    elems: Vec<u8>,
    block_ends: Vec<u32>,
    part_ends: Vec<u32>,
    block_masks: Vec<u32>,
}

impl PartitionTable {
    fn build(n: usize, partitions: impl Iterator<Item = Vec<Vec<u8>>>) -> Self {
        let mut elems = Vec::new();
        let mut block_ends = Vec::new();
        let mut part_ends = Vec::new();
        let mut block_masks = Vec::new();
        for blocks in partitions {
            for block in blocks {
                let mut mask = 0u32;
                for &e in &block {
                    mask |= 1 << e;
                }
                elems.extend_from_slice(&block);
                block_ends.push(elems.len() as u32);
                block_masks.push(mask);
            }
            part_ends.push(block_ends.len() as u32);
        }
        PartitionTable {
            n,
            elems,
            block_ends,
            part_ends,
            block_masks,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.part_ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.part_ends.is_empty()
    }

    pub fn num_blocks_of(&self, i: usize) -> usize {
        let lo = if i == 0 { 0 } else { self.part_ends[i - 1] as usize };
        self.part_ends[i] as usize - lo
    }

    /// Iterate the blocks of partition `i` as `(elements, bitmask)` pairs.
    pub fn blocks_of(&self, i: usize) -> impl Iterator<Item = (&[u8], u32)> + '_ {
        let lo = if i == 0 { 0 } else { self.part_ends[i - 1] as usize };
        let hi = self.part_ends[i] as usize;
        (lo..hi).map(move |b| {
            let start = if b == 0 { 0 } else { self.block_ends[b - 1] as usize };
            let end = self.block_ends[b] as usize;
            (&self.elems[start..end], self.block_masks[b])
        })
    }

    pub fn to_partition(&self, i: usize) -> SetPartition {
        let blocks = self
            .blocks_of(i)
            .map(|(b, _)| b.iter().map(|&e| e as usize).collect())
            .collect();
        SetPartition::new(self.n, blocks).expect("table rows are valid partitions")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum TableKind {
    Nc,
    In,
}

type TableKey = (TableKind, usize, u32, u16);

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<PartitionTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<PartitionTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Bitmask admitting every block size.
pub(crate) const ALL_SIZES: u16 = u16::MAX;

fn build_table(kind: TableKind, n: usize, chi: Option<&ChiMap>, sizes: u16) -> Result<Arc<PartitionTable>> {
    check_cap(n)?;
    let right_mask = chi.map(|c| c.right_mask()).unwrap_or(0);
    let key = (kind, n, right_mask, sizes);
    if let Some(hit) = table_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let s: Option<Vec<usize>> = chi.map(|c| c.s_chi());
    let map_blocks = |blocks: &Vec<Vec<u8>>| -> Option<Vec<Vec<u8>>> {
        if blocks.iter().any(|b| sizes & (1 << (b.len().min(15))) == 0) {
            return None;
        }
        match &s {
            None => Some(blocks.clone()),
            Some(perm) => Some(
                blocks
                    .iter()
                    .map(|b| {
                        let mut mapped: Vec<u8> =
                            b.iter().map(|&e| perm[e as usize] as u8).collect();
                        mapped.sort_unstable();
                        mapped
                    })
                    .collect(),
            ),
        }
    };
    let table = match kind {
        TableKind::Nc => {
            let raw = nc_blocks_raw(n);
            PartitionTable::build(n, raw.iter().filter_map(map_blocks))
        }
        TableKind::In => {
            let parts = enumerate_interval_partitions(n)?;
            PartitionTable::build(
                n,
                parts.iter().filter_map(|p| {
                    let blocks: Vec<Vec<u8>> = p
                        .blocks()
                        .iter()
                        .map(|b| b.iter().map(|&e| e as u8).collect())
                        .collect();
                    map_blocks(&blocks)
                }),
            )
        }
    };
    let arc = Arc::new(table);
    Ok(table_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(arc)
        .clone())
}

/// Cached NC(n) in enumeration order with unfiltered blocks.
pub fn nc_table(n: usize) -> Result<Arc<PartitionTable>> {
    build_table(TableKind::Nc, n, None, ALL_SIZES)
}

/// Cached NC(n) restricted to partitions whose block sizes all lie in the
/// mask (`bit s` set admits size `s`, sizes above 15 use bit 15).
pub fn nc_table_with_sizes(n: usize, sizes: u16) -> Result<Arc<PartitionTable>> {
    build_table(TableKind::Nc, n, None, sizes)
}

/// Cached `BNC(chi)` aligned index-for-index with `nc_table(n)` when the size
/// filter admits everything.
pub fn bnc_table(chi: &ChiMap, sizes: u16) -> Result<Arc<PartitionTable>> {
    build_table(TableKind::Nc, chi.len(), Some(chi), sizes)
}

/// Cached IN(n).
pub fn in_table(n: usize) -> Result<Arc<PartitionTable>> {
    build_table(TableKind::In, n, None, ALL_SIZES)
}

/// Cached `BI(chi)` aligned index-for-index with `in_table(n)`.
pub fn bi_table(chi: &ChiMap, sizes: u16) -> Result<Arc<PartitionTable>> {
    build_table(TableKind::In, chi.len(), Some(chi), sizes)
}
