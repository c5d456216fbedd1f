//! Set partitions of the parties and the product vectors that conform to them.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, permutation_map, Dims, StateVector};
use crate::rng::{unit_vector, Rng};

/// A partition of `{0..n}` into disjoint blocks, kept in canonical form:
/// each block sorted, blocks ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &p in b {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, parties: n });
                }
                if seen[p] {
                    return Err(Error::InvalidPartition(format!("party {p} appears in two blocks")));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("party {p} not covered")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    /// Two-block partition `cut | complement`.
    pub fn bipartition(n: usize, cut: &[usize]) -> Result<Self> {
        let rest: Vec<usize> = (0..n).filter(|p| !cut.contains(p)).collect();
        if cut.is_empty() || rest.is_empty() {
            return Err(Error::InvalidPartition("a cut needs two nonempty sides".into()));
        }
        Partition::new(n, vec![cut.to_vec(), rest])
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|p| vec![p]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn parties(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Parties listed block by block; the tensor layout in which this
    /// partition's product vectors are plain Kronecker products.
    pub fn layout(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn block_dims(&self, dims: &Dims) -> Vec<usize> {
        self.blocks.iter().map(|b| dims.product_of(b)).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let s: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            write!(f, "{{{}}}", s.join(","))?;
        }
        Ok(())
    }
}

/// All set partitions of `{0..n}` whose blocks have at most `m` elements,
/// with the finest partition first.
pub fn enumerate_partitions(n: usize, m: usize) -> Vec<Partition> {
    fn grow(next: usize, n: usize, m: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Partition>) {
        if next == n {
            out.push(Partition { blocks: blocks.clone() });
            return;
        }
        for i in 0..blocks.len() {
            if blocks[i].len() < m {
                blocks[i].push(next);
                grow(next + 1, n, m, blocks, out);
                blocks[i].pop();
            }
        }
        blocks.push(vec![next]);
        grow(next + 1, n, m, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    if n == 0 || m == 0 {
        return out;
    }
    grow(0, n, m.min(n), &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.blocks.len().cmp(&a.blocks.len()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// The family of partitions whose product vectors define the constraint set
/// of a witness problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionScheme {
    parties: usize,
    max_block: usize,
    partitions: Vec<Partition>,
    fixed: bool,
}

impl PartitionScheme {
    /// Witnesses nonnegative on every state whose pure terms factor into
    /// blocks of at most `m` parties.
    pub fn m_separable(n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPartition("need at least two parties".into()));
        }
        if m == 0 || m >= n {
            return Err(Error::InvalidPartition(format!(
                "block bound m = {m} must satisfy 1 <= m < n = {n}"
            )));
        }
        Ok(PartitionScheme {
            parties: n,
            max_block: m,
            partitions: enumerate_partitions(n, m),
            fixed: false,
        })
    }

    /// Single fixed bipartition `cut | rest`.
    pub fn bipartite(n: usize, cut: &[usize]) -> Result<Self> {
        let p = Partition::bipartition(n, cut)?;
        Ok(PartitionScheme {
            parties: n,
            max_block: p.max_block(),
            partitions: vec![p],
            fixed: true,
        })
    }

    pub fn from_partitions(n: usize, partitions: Vec<Partition>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::InvalidPartition("scheme needs at least one partition".into()));
        }
        for p in &partitions {
            if p.parties() != n {
                return Err(Error::InvalidPartition(format!("{p} does not cover {n} parties")));
            }
        }
        let max_block = partitions.iter().map(Partition::max_block).max().unwrap_or(1);
        Ok(PartitionScheme {
            parties: n,
            max_block,
            partitions,
            fixed: false,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn max_block(&self) -> usize {
        self.max_block
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// The `cut` side of a fixed bipartition.
    pub fn cut(&self) -> Option<&[usize]> {
        if self.fixed || (self.parties == 2 && self.max_block == 1) {
            Some(&self.partitions[0].blocks()[0])
        } else {
            None
        }
    }

    pub fn check_dims(&self, dims: &Dims) -> Result<()> {
        if dims.parties() != self.parties {
            return Err(Error::WrongPartyCount {
                expected: self.parties,
                found: dims.parties(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fixed {
            write!(f, "cut {}", self.partitions[0])
        } else {
            write!(f, "m={} over {} parties", self.max_block, self.parties)
        }
    }
}

/// A pure state that factorizes across the blocks of a partition.
#[derive(Clone, Debug)]
pub struct ProductVector {
    partition: Partition,
    factors: Vec<StateVector>,
    assembled: StateVector,
}

impl ProductVector {
    pub fn new(dims: &Dims, partition: Partition, factors: Vec<StateVector>) -> Result<Self> {
        if partition.parties() != dims.parties() {
            return Err(Error::WrongPartyCount {
                expected: dims.parties(),
                found: partition.parties(),
            });
        }
        if factors.len() != partition.blocks().len() {
            return Err(Error::InvalidPartition("one factor per block required".into()));
        }
        for (f, d) in factors.iter().zip(partition.block_dims(dims)) {
            if f.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: f.len() });
            }
            let norm = f.norm();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { norm });
            }
        }
        let assembled = assemble(dims, &partition, &factors)?;
        Ok(ProductVector {
            partition,
            factors,
            assembled,
        })
    }

    /// Independent uniformly random factor on each block.
    pub fn random(dims: &Dims, partition: &Partition, rng: &mut Rng) -> Result<Self> {
        let factors = partition
            .block_dims(dims)
            .into_iter()
            .map(|d| unit_vector(d, rng))
            .collect();
        ProductVector::new(dims, partition.clone(), factors)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn factors(&self) -> &[StateVector] {
        &self.factors
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&[usize], &StateVector)> {
        self.partition.blocks().iter().map(Vec::as_slice).zip(&self.factors)
    }

    /// The full vector in canonical party order.
    pub fn assembled(&self) -> &StateVector {
        &self.assembled
    }
}

fn assemble(dims: &Dims, partition: &Partition, factors: &[StateVector]) -> Result<StateVector> {
    let mut v = StateVector::from_element(1, Complex64::new(1.0, 0.0));
    for f in factors {
        v = kron_vec(&v, f);
    }
    let map = permutation_map(dims, &partition.layout())?;
    let mut out = StateVector::zeros(v.len());
    for (i, &c) in map.iter().enumerate() {
        out[c] = v[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{schmidt_decompose, ONE, ZERO};
    use crate::rng::rng;

    fn sets(ps: &[Partition]) -> Vec<Vec<Vec<usize>>> {
        let mut v: Vec<_> = ps.iter().map(|p| p.blocks().to_vec()).collect();
        v.sort();
        v
    }

    #[test]
    fn three_parties_singletons() {
        let ps = enumerate_partitions(3, 1);
        assert_eq!(sets(&ps), vec![vec![vec![0], vec![1], vec![2]]]);
    }

    #[test]
    fn three_parties_pairs() {
        let ps = enumerate_partitions(3, 2);
        let mut want = vec![
            vec![vec![0], vec![1], vec![2]],
            vec![vec![0, 1], vec![2]],
            vec![vec![0, 2], vec![1]],
            vec![vec![0], vec![1, 2]],
        ];
        want.sort();
        assert_eq!(sets(&ps), want);
        assert_eq!(ps[0], Partition::singletons(3));
    }

    /// Brute force: label each party with a block id and keep labelings in
    /// restricted-growth form.
    fn brute_count(n: usize, m: usize) -> usize {
        let mut count = 0;
        let total = n.pow(n as u32);
        for code in 0..total {
            let labels: Vec<usize> = (0..n).map(|i| (code / n.pow(i as u32)) % n).collect();
            let mut max = 0;
            let mut rgf = true;
            for (i, &l) in labels.iter().enumerate() {
                if i == 0 && l != 0 || l > max + 1 {
                    rgf = false;
                    break;
                }
                max = max.max(l);
            }
            if !rgf {
                continue;
            }
            if (0..n).all(|b| labels.iter().filter(|&&l| l == b).count() <= m) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn partition_counts_match_brute_force() {
        assert_eq!(enumerate_partitions(4, 2).len(), 10);
        for n in 1..=5 {
            for m in 1..=n {
                assert_eq!(enumerate_partitions(n, m).len(), brute_count(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn partitions_are_valid() {
        for p in enumerate_partitions(5, 3) {
            assert!(p.max_block() <= 3);
            assert_eq!(Partition::new(5, p.blocks().to_vec()).unwrap(), p);
        }
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1, 3], vec![2]]).is_err());
        assert!(Partition::bipartition(2, &[0, 1]).is_err());
        assert!(PartitionScheme::m_separable(3, 3).is_err());
    }

    #[test]
    fn product_vector_layout() {
        // blocks {0,2}{1} on 3 qubits: factor |01> on (0,2), |1> on 1 -> |011> canonical
        let dims = Dims::qubits(3);
        let part = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        let f02 = StateVector::from_vec(vec![ZERO, ONE, ZERO, ZERO]);
        let f1 = StateVector::from_vec(vec![ZERO, ONE]);
        let pv = ProductVector::new(&dims, part, vec![f02, f1]).unwrap();
        let idx = pv.assembled().iter().position(|z| z.norm() > 0.5).unwrap();
        assert_eq!(idx, 0b011);
    }

    #[test]
    fn random_bipartite_product_has_schmidt_rank_one() {
        let dims = Dims::qubits(2);
        let mut r = rng(7);
        for _ in 0..20 {
            let pv = ProductVector::random(&dims, &Partition::singletons(2), &mut r).unwrap();
            let s = schmidt_decompose(pv.assembled(), &dims).unwrap();
            assert_eq!(s.rank(1e-10), 1);
        }
    }
}
