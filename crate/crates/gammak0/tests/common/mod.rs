//! Independent oracles for the integration suites. Everything here computes
//! by routes disjoint from the code it checks: Laplace expansion and gcds of
//! minors instead of Smith reduction, fraction-free elimination for ranks,
//! explicit coset enumeration for quotient structure, and element-level
//! additivity for homomorphism certification.
//!
//! Each test binary compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use gammak0::abelian::FgAbelianGroup;
use gammak0::intlin::IntMatrix;

/// Determinant by Laplace expansion along the first row. Exponential; only
/// for small oracle matrices.
pub fn det_expansion(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n));
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = BigInt::zero();
    for (j, top) in m[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let cofactor = top * det_expansion(&minor);
        if j % 2 == 0 {
            det += cofactor;
        } else {
            det -= cofactor;
        }
    }
    det
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// All k-subsets of 0..n in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            go(i + 1, n, k, current, out);
            current.pop();
        }
    }
    go(0, n, k, &mut current, &mut out);
    out
}

/// Invariant factors from the gcd-of-minors formula: `d_k` is the gcd of all
/// k x k minors divided by the gcd of all (k-1) x (k-1) minors.
pub fn minors_invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let rows = to_rows(m);
    let limit = m.rows().min(m.cols());
    let mut factors = Vec::new();
    let mut previous = BigInt::one();
    for k in 1..=limit {
        let mut g = BigInt::zero();
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let sub: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| rows[r][c].clone()).collect())
                    .collect();
                g = g.gcd(&det_expansion(&sub));
            }
        }
        if g.is_zero() {
            break; // rank reached
        }
        factors.push(&g / &previous);
        previous = g;
    }
    factors
}

/// Rank by fraction-free (Bareiss) row elimination with column skipping.
pub fn bareiss_rank(m: &IntMatrix) -> usize {
    let mut a = to_rows(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                a[i][j] = num / &prev; // exact for fraction-free elimination
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        rank += 1;
    }
    rank
}

const COSET_ENUMERATION_CAP: u128 = 400_000;

/// Torsion invariant factors of `Z^m / im(M)` by explicit coset enumeration,
/// for matrices of full row rank (finite quotient). The quotient is realized
/// inside `(Z/R)^m` where `R` annihilates it, the column span is closed off
/// by breadth-first search, and the structure is read off the histogram of
/// coset orders, prime by prime. Returns `None` when the search space is too
/// large or the quotient is infinite.
pub fn coset_invariant_factors(m: &IntMatrix) -> Option<Vec<BigInt>> {
    let rows = m.rows();
    if bareiss_rank(m) != rows {
        return None;
    }
    if rows == 0 {
        return Some(Vec::new());
    }
    // gcd of the maximal minors = product of all invariant factors,
    // a multiple of the quotient exponent
    let row_data = to_rows(m);
    let mut annihilator = BigInt::zero();
    for cs in subsets(m.cols(), rows) {
        let sub: Vec<Vec<BigInt>> = row_data
            .iter()
            .map(|row| cs.iter().map(|&c| row[c].clone()).collect())
            .collect();
        annihilator = annihilator.gcd(&det_expansion(&sub));
    }
    let modulus = annihilator.abs().to_u64()?;
    debug_assert!(modulus > 0, "full row rank has a nonzero maximal minor");
    if modulus == 1 {
        return Some(Vec::new());
    }
    let space: u128 = (0..rows).try_fold(1u128, |acc, _| acc.checked_mul(modulus as u128))?;
    if space > COSET_ENUMERATION_CAP {
        return None;
    }

    // subgroup generated by the columns inside (Z/R)^m
    let columns: Vec<Vec<u64>> = (0..m.cols())
        .map(|j| {
            m.column(j)
                .iter()
                .map(|e| e.mod_floor(&BigInt::from(modulus)).to_u64().unwrap())
                .collect()
        })
        .collect();
    let mut span: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut frontier = vec![vec![0u64; rows]];
    span.insert(frontier[0].clone());
    while let Some(x) = frontier.pop() {
        for col in &columns {
            let next: Vec<u64> = x.iter().zip(col).map(|(a, b)| (a + b) % modulus).collect();
            if span.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    let quotient_order = space / span.len() as u128;

    // histogram of coset orders: each coset has |span| representatives
    let mut order_counts: BTreeMap<u64, u128> = BTreeMap::new();
    let divisors: Vec<u64> = (1..=modulus).filter(|d| modulus % d == 0).collect();
    let mut point = vec![0u64; rows];
    loop {
        let order = divisors
            .iter()
            .copied()
            .find(|&t| {
                let scaled: Vec<u64> = point
                    .iter()
                    .map(|&a| (a as u128 * t as u128 % modulus as u128) as u64)
                    .collect();
                span.contains(&scaled)
            })
            .expect("the modulus annihilates every coset");
        *order_counts.entry(order).or_insert(0) += 1;
        let mut idx = rows;
        loop {
            if idx == 0 {
                break;
            }
            idx -= 1;
            point[idx] += 1;
            if point[idx] < modulus {
                break;
            }
            point[idx] = 0;
        }
        if point.iter().all(|&c| c == 0) {
            break;
        }
    }
    for count in order_counts.values_mut() {
        debug_assert_eq!(*count % span.len() as u128, 0);
        *count /= span.len() as u128;
    }
    debug_assert_eq!(order_counts.values().sum::<u128>(), quotient_order);

    // p-primary structure from counts of elements killed by p^j
    let mut primes: Vec<u64> = Vec::new();
    let mut q = quotient_order;
    let mut p = 2u64;
    while (p as u128) * (p as u128) <= q {
        if q.is_multiple_of(p as u128) {
            primes.push(p);
            while q.is_multiple_of(p as u128) {
                q /= p as u128;
            }
        }
        p += 1;
    }
    if q > 1 {
        primes.push(q as u64);
    }

    let mut prime_powers: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &p in &primes {
        let killed_by = |j: u32| -> u128 {
            let pj = (p as u128).pow(j);
            order_counts
                .iter()
                .filter(|(&ord, _)| {
                    let mut o = ord as u128;
                    // ord divides p^j iff ord is a power of p not exceeding it
                    while o.is_multiple_of(p as u128) {
                        o /= p as u128;
                    }
                    o == 1 && (ord as u128) <= pj
                })
                .map(|(_, &c)| c)
                .sum()
        };
        // a_j = number of cyclic p-factors of exponent at least j
        let mut a: Vec<u32> = Vec::new();
        let mut j = 1u32;
        loop {
            let ratio = killed_by(j) / killed_by(j - 1);
            if ratio == 1 {
                break;
            }
            let mut log = 0u32;
            let mut r = ratio;
            while r > 1 {
                debug_assert_eq!(r % p as u128, 0);
                r /= p as u128;
                log += 1;
            }
            a.push(log);
            j += 1;
        }
        let mut exponents: Vec<u32> = Vec::new();
        for (depth, &count) in a.iter().enumerate() {
            let next = a.get(depth + 1).copied().unwrap_or(0);
            for _ in 0..(count - next) {
                exponents.push(depth as u32 + 1);
            }
        }
        exponents.sort_unstable_by(|x, y| y.cmp(x)); // largest first
        prime_powers.insert(p, exponents);
    }

    // assemble the chain: the k-th largest factor collects the k-th largest
    // power of every prime
    let length = prime_powers.values().map(Vec::len).max().unwrap_or(0);
    let mut chain: Vec<BigInt> = Vec::new();
    for i in 0..length {
        let mut d = BigInt::one();
        for (&p, exps) in &prime_powers {
            if let Some(&e) = exps.get(i) {
                d *= BigInt::from(p).pow(e);
            }
        }
        chain.push(d);
    }
    chain.reverse(); // ascending divisibility
    Some(chain)
}

/// Element-level well-definedness: the coordinate map is additive on every
/// pair of reduced representatives.
pub fn brute_force_hom_well_defined(
    source: &FgAbelianGroup,
    target: &FgAbelianGroup,
    matrix: &IntMatrix,
) -> bool {
    let elements = source.enumerate_elements().expect("finite source");
    let apply = |e: &gammak0::abelian::GroupElement| target.element(matrix.mul_vec(e.coords()));
    elements.iter().enumerate().all(|(i, a)| {
        elements[i..]
            .iter()
            .all(|b| apply(&a.add(b)) == apply(a).add(&apply(b)))
    })
}

/// Counts automorphisms by exhausting every generator-image tuple and
/// testing additivity and bijectivity at the element level.
pub fn brute_force_aut_count(group: &FgAbelianGroup) -> usize {
    let elements = group.enumerate_elements().expect("finite group");
    let generators = group.num_generators();
    if generators == 0 {
        return 1;
    }
    let mut count = 0;
    let mut picks = vec![0usize; generators];
    loop {
        let matrix = IntMatrix::from_fn(generators, generators, |i, j| {
            elements[picks[j]].coords()[i].clone()
        });
        if brute_force_hom_well_defined(group, group, &matrix) {
            let image: BTreeSet<_> = elements
                .iter()
                .map(|e| group.element(matrix.mul_vec(e.coords())))
                .collect();
            if image.len() == elements.len() {
                count += 1;
            }
        }
        let mut idx = generators;
        loop {
            if idx == 0 {
                return count;
            }
            idx -= 1;
            picks[idx] += 1;
            if picks[idx] < elements.len() {
                break;
            }
            picks[idx] = 0;
        }
    }
}

/// Every finite abelian group of order at most `max_order`, as canonical
/// invariant-factor chains, in a deterministic order.
pub fn all_finite_groups_up_to(max_order: u64) -> Vec<FgAbelianGroup> {
    fn extend(chain: &mut Vec<u64>, product: u64, max_order: u64, out: &mut Vec<Vec<u64>>) {
        let min_d = chain.last().copied().unwrap_or(2);
        for d in min_d..=max_order {
            if product.saturating_mul(d) > max_order {
                break;
            }
            if chain.last().is_some_and(|&last| d % last != 0) {
                continue;
            }
            chain.push(d);
            out.push(chain.clone());
            extend(chain, product * d, max_order, out);
            chain.pop();
        }
    }
    let mut chains: Vec<Vec<u64>> = vec![Vec::new()];
    extend(&mut Vec::new(), 1, max_order, &mut chains);
    chains
        .into_iter()
        .map(|chain| {
            let orders: Vec<BigInt> = chain.iter().map(|&d| BigInt::from(d)).collect();
            FgAbelianGroup::from_orders(&orders, 0)
        })
        .collect()
}

/// Uniform random matrix with entries in `[lo, hi]`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(lo..=hi)))
}
