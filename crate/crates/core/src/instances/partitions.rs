//! Set partitions (block union) and set compositions (concatenation).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presheaf::{mask_indices, EnumCache, InstanceDescriptor, Mask, Presheaf};

/// Block of each ground element; blocks numbered by first occurrence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    block_of: Vec<u8>,
}

fn restricted_growth(assignment: &[u8]) -> Vec<u8> {
    let mut renum: Vec<Option<u8>> = vec![None; 256];
    let mut next = 0u8;
    assignment
        .iter()
        .map(|&b| {
            *renum[b as usize].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

fn block_count(assignment: &[u8]) -> usize {
    assignment.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
}

fn blocks_of(assignment: &[u8]) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); block_count(assignment)];
    for (i, &b) in assignment.iter().enumerate() {
        blocks[b as usize].push(i);
    }
    blocks
}

fn assignment_from_sizes(sizes: &[usize]) -> Vec<u8> {
    sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b as u8, s)).collect()
}

impl SetPartition {
    /// From any block labelling of the ground elements.
    pub fn from_assignment(assignment: &[u8]) -> Self {
        SetPartition { block_of: restricted_growth(assignment) }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        Ok(SetPartition::from_assignment(&blocks_to_assignment(n, blocks)?))
    }

    /// Canonical partition with the given block sizes.
    pub fn of_shape(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::domain("blocks must be nonempty"));
        }
        let mut sorted = sizes.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SetPartition { block_of: assignment_from_sizes(&sorted) })
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        blocks_of(&self.block_of)
    }

    /// Block sizes, decreasing.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks().iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    pub fn merge(&self, other: &SetPartition) -> SetPartition {
        let k = block_count(&self.block_of) as u8;
        let mut a = self.block_of.clone();
        a.extend(other.block_of.iter().map(|b| b + k));
        SetPartition { block_of: a }
    }

    fn induced(&self, mask: Mask) -> SetPartition {
        let kept: Vec<u8> = mask_indices(mask).map(|i| self.block_of[i]).collect();
        SetPartition::from_assignment(&kept)
    }

    fn canonical(&self) -> SetPartition {
        SetPartition { block_of: assignment_from_sizes(&self.shape()) }
    }
}

fn blocks_to_assignment(n: usize, blocks: &[Vec<usize>]) -> Result<Vec<u8>> {
    let mut a = vec![u8::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::domain("blocks must be nonempty"));
        }
        for &i in block {
            if i >= n || a[i] != u8::MAX {
                return Err(Error::domain(format!("element {} is out of range or repeated", i + 1)));
            }
            a[i] = b as u8;
        }
    }
    if a.contains(&u8::MAX) {
        return Err(Error::domain("blocks do not cover the ground set"));
    }
    Ok(a)
}

impl Ord for SetPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.shape().cmp(&other.shape()))
            .then_with(|| self.block_of.cmp(&other.block_of))
    }
}

impl PartialOrd for SetPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_blocks(f: &mut fmt::Formatter<'_>, blocks: &[Vec<usize>]) -> fmt::Result {
    let parts: Vec<String> =
        blocks.iter().map(|b| b.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")).collect();
    f.write_str(&parts.join("|"))
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        write_blocks(f, &self.blocks())?;
        f.write_str("}")
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition({self})")
    }
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_sizes(s: &str, body: &str) -> Result<Vec<usize>> {
    body.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::parse(s, format!("`{t}` is not a positive block size"))),
        })
        .collect()
}

/// Parses `open b|b|… close` where each block is a comma list of 1-based
/// elements.
fn parse_blocks(s: &str, open: char, close: char) -> Result<(usize, Vec<Vec<usize>>)> {
    let body = s
        .strip_prefix(open)
        .and_then(|t| t.strip_suffix(close))
        .ok_or_else(|| Error::parse(s, format!("expected `{open}…{close}`")))?;
    if body.trim().is_empty() {
        return Ok((0, Vec::new()));
    }
    let mut blocks = Vec::new();
    let mut n = 0;
    for part in body.split('|') {
        let mut block = Vec::new();
        for t in part.split(',') {
            match t.trim().parse::<usize>() {
                Ok(v) if v > 0 => {
                    block.push(v - 1);
                    n += 1;
                }
                _ => return Err(Error::parse(s, format!("`{t}` is not a positive element"))),
            }
        }
        blocks.push(block);
    }
    Ok((n, blocks))
}

impl FromStr for SetPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("part:") {
            return SetPartition::of_shape(&parse_sizes(s, body)?);
        }
        let (n, blocks) = parse_blocks(s, '{', '}')?;
        SetPartition::from_blocks(n, &blocks).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// Ordered block of each ground element; every block index below the block
/// count is used.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetComposition {
    block_of: Vec<u8>,
}

impl SetComposition {
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        Ok(SetComposition { block_of: blocks_to_assignment(n, blocks)? })
    }

    pub fn of_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::domain("blocks must be nonempty"));
        }
        Ok(SetComposition { block_of: assignment_from_sizes(sizes) })
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        blocks_of(&self.block_of)
    }

    /// Block sizes in block order.
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks().iter().map(Vec::len).collect()
    }

    pub fn concat(&self, other: &SetComposition) -> SetComposition {
        let k = block_count(&self.block_of) as u8;
        let mut a = self.block_of.clone();
        a.extend(other.block_of.iter().map(|b| b + k));
        SetComposition { block_of: a }
    }

    fn induced(&self, mask: Mask) -> SetComposition {
        let kept: Vec<u8> = mask_indices(mask).map(|i| self.block_of[i]).collect();
        let mut used: Vec<u8> = kept.clone();
        used.sort_unstable();
        used.dedup();
        SetComposition { block_of: kept.iter().map(|b| used.binary_search(b).expect("present") as u8).collect() }
    }

    fn canonical(&self) -> SetComposition {
        SetComposition { block_of: assignment_from_sizes(&self.sizes()) }
    }
}

impl Ord for SetComposition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.sizes().cmp(&other.sizes()))
            .then_with(|| self.block_of.cmp(&other.block_of))
    }
}

impl PartialOrd for SetComposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SetComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        write_blocks(f, &self.blocks())?;
        f.write_str(")")
    }
}

impl fmt::Debug for SetComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetComposition({self})")
    }
}

impl Serialize for SetComposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for SetComposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("comp:") {
            return SetComposition::of_sizes(&parse_sizes(s, body)?);
        }
        let (n, blocks) = parse_blocks(s, '(', ')')?;
        SetComposition::from_blocks(n, &blocks).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// Integer partitions of `n`, each decreasing, in increasing lexicographic
/// order.
pub fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in 1..=rem.min(max) {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Integer compositions of `n` in increasing lexicographic order.
pub fn integer_compositions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in 1..=rem {
            cur.push(p);
            rec(rem - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// `(SPart, ⊎, ∅)`.
#[derive(Debug, Clone)]
pub struct SPart {
    cap: usize,
    cache: EnumCache<SetPartition>,
}

impl SPart {
    pub const DEFAULT_CAP: usize = 12;

    pub fn new() -> Self {
        SPart { cap: Self::DEFAULT_CAP, cache: EnumCache::default() }
    }

    pub fn with_cap(cap: usize) -> Self {
        SPart { cap, cache: EnumCache::default() }
    }
}

impl Default for SPart {
    fn default() -> Self {
        Self::new()
    }
}

impl Presheaf for SPart {
    type Obj = SetPartition;

    fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor { name: "spart", associative: true, commutative: true, cap: self.cap }
    }

    fn size(&self, o: &SetPartition) -> usize {
        o.len()
    }

    fn induced(&self, o: &SetPartition, mask: Mask) -> SetPartition {
        o.induced(mask)
    }

    fn canonical(&self, o: &SetPartition) -> SetPartition {
        o.canonical()
    }

    fn relabel(&self, o: &SetPartition, perm: &[usize]) -> SetPartition {
        let mut a = vec![0; o.len()];
        for (i, &p) in perm.iter().enumerate() {
            a[p] = o.block_of[i];
        }
        SetPartition::from_assignment(&a)
    }

    fn encode(&self, o: &SetPartition) -> Vec<u8> {
        o.shape().into_iter().map(|s| s as u8).collect()
    }

    fn generate(&self, n: usize) -> Vec<SetPartition> {
        let mut out: Vec<SetPartition> =
            integer_partitions(n).iter().map(|s| SetPartition::of_shape(s).expect("positive parts")).collect();
        out.sort();
        out
    }

    fn cache(&self) -> &EnumCache<SetPartition> {
        &self.cache
    }

    fn unit(&self) -> SetPartition {
        SetPartition { block_of: Vec::new() }
    }

    fn product(&self, a: &SetPartition, b: &SetPartition) -> Result<SetPartition> {
        Ok(a.merge(b).canonical())
    }

    fn factor_pairs(&self, a: &SetPartition) -> Result<Vec<(SetPartition, SetPartition)>> {
        let shape = a.shape();
        let mut out = std::collections::BTreeSet::new();
        for sel in 0u32..(1 << shape.len()) {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, &s) in shape.iter().enumerate() {
                if sel & (1 << i) != 0 {
                    l.push(s)
                } else {
                    r.push(s)
                }
            }
            out.insert((SetPartition::of_shape(&l)?, SetPartition::of_shape(&r)?));
        }
        Ok(out.into_iter().collect())
    }

    fn irreducible_factors(&self, a: &SetPartition) -> Result<Vec<SetPartition>> {
        let mut parts: Vec<_> = a.shape().iter().map(|&s| SetPartition::of_shape(&[s])).collect::<Result<_>>()?;
        parts.sort();
        Ok(parts)
    }

    fn is_irreducible(&self, a: &SetPartition) -> Result<bool> {
        Ok(a.shape().len() == 1)
    }
}

/// `(SComp, ·, ∅)` with concatenation of block lists.
#[derive(Debug, Clone)]
pub struct SComp {
    cap: usize,
    cache: EnumCache<SetComposition>,
}

impl SComp {
    pub const DEFAULT_CAP: usize = 12;

    pub fn new() -> Self {
        SComp { cap: Self::DEFAULT_CAP, cache: EnumCache::default() }
    }

    pub fn with_cap(cap: usize) -> Self {
        SComp { cap, cache: EnumCache::default() }
    }
}

impl Default for SComp {
    fn default() -> Self {
        Self::new()
    }
}

impl Presheaf for SComp {
    type Obj = SetComposition;

    fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor { name: "scomp", associative: true, commutative: false, cap: self.cap }
    }

    fn size(&self, o: &SetComposition) -> usize {
        o.len()
    }

    fn induced(&self, o: &SetComposition, mask: Mask) -> SetComposition {
        o.induced(mask)
    }

    fn canonical(&self, o: &SetComposition) -> SetComposition {
        o.canonical()
    }

    fn relabel(&self, o: &SetComposition, perm: &[usize]) -> SetComposition {
        let mut a = vec![0; o.len()];
        for (i, &p) in perm.iter().enumerate() {
            a[p] = o.block_of[i];
        }
        SetComposition { block_of: a }
    }

    fn encode(&self, o: &SetComposition) -> Vec<u8> {
        o.sizes().into_iter().map(|s| s as u8).collect()
    }

    fn generate(&self, n: usize) -> Vec<SetComposition> {
        let mut out: Vec<SetComposition> =
            integer_compositions(n).iter().map(|s| SetComposition::of_sizes(s).expect("positive parts")).collect();
        out.sort();
        out
    }

    fn cache(&self) -> &EnumCache<SetComposition> {
        &self.cache
    }

    fn unit(&self) -> SetComposition {
        SetComposition { block_of: Vec::new() }
    }

    fn product(&self, a: &SetComposition, b: &SetComposition) -> Result<SetComposition> {
        Ok(a.concat(b).canonical())
    }

    fn factor_pairs(&self, a: &SetComposition) -> Result<Vec<(SetComposition, SetComposition)>> {
        let sizes = a.sizes();
        (0..=sizes.len())
            .map(|k| Ok((SetComposition::of_sizes(&sizes[..k])?, SetComposition::of_sizes(&sizes[k..])?)))
            .collect::<Result<Vec<_>>>()
            .map(|mut v| {
                v.sort();
                v
            })
    }

    /// The block list, in order.
    fn irreducible_factors(&self, a: &SetComposition) -> Result<Vec<SetComposition>> {
        a.sizes().iter().map(|&s| SetComposition::of_sizes(&[s])).collect()
    }

    fn is_irreducible(&self, a: &SetComposition) -> Result<bool> {
        Ok(a.sizes().len() == 1)
    }
}
