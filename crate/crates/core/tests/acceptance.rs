//! Acceptance suite: one test per criterion, each printing a single
//! `[PASS]` / `[FAIL]` line and enforcing its runtime budget. Reference
//! values come from oracles written here, independently of the library
//! code paths under test.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use respart::dist::{
    dist_even_even, dist_even_odd, dist_odd_odd, generating_function_audit, limit_dist, symmetric_rank_count, LimitKind,
};
use respart::experiment::{run_trials, ExperimentConfig};
use respart::fourier::{conflict_bound_check, expected_count, ordered_partition_count, prob_all_degrees_congruent};
use respart::gf2::{count_partitions_q2, Q2Condition};
use respart::modq::{
    combinatorial_subspaces, count_congruence_solutions, exhaustive_lemma_audit, incidence_matrix,
    is_combinatorial_subspace, verify_sum_inequality, AuditMode, BoxSet, ModqMatrix,
};
use respart::partition::count_good;
use respart::pmf::{tv_distance, RationalPmf};
use respart::rng::{rng_from_seed, RngCore};
use respart::{Graph, PartitionSpec, Probability};

fn report(id: u32, title: &str, ok: bool, detail: &str, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed <= budget;
    let pass = ok && in_time;
    let line = format!(
        "[{}] criterion {id:>2}: {title} | {detail} | {:.3}s of {:.0}s budget{}\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if in_time { "" } else { " (over budget)" }
    );
    // Written straight to the process stdout so the line survives capture.
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    pass
}

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges: Vec<(usize, usize)> =
        all_pairs(n).into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e).collect();
    Graph::from_edges(n, &edges)
}

/// Two-part partitions by scanning every subset `S` as the part with the
/// first residue.
fn q2_subset_oracle(g: &Graph, cond: Q2Condition) -> u64 {
    let n = g.n();
    let adj: Vec<u64> = (0..n).map(|u| (0..n).filter(|&v| g.has_edge(u, v)).map(|v| 1u64 << v).sum()).collect();
    let full = (1u64 << n) - 1;
    let parity_ok = |set: u64, want_odd: bool| {
        (0..n).filter(|&v| set >> v & 1 == 1).all(|v| ((adj[v] & set).count_ones() % 2 == 1) == want_odd)
    };
    let (first_odd, second_odd) = match cond {
        Q2Condition::EvenEven => (false, false),
        Q2Condition::EvenOdd => (false, true),
        Q2Condition::OddOdd => (true, true),
    };
    let ordered = (0..=full).filter(|&s| parity_ok(s, first_odd) && parity_ok(full ^ s, second_odd)).count() as u64;
    if first_odd == second_odd {
        ordered / 2
    } else {
        ordered
    }
}

fn exhaustive_histogram(n: usize, count: impl Fn(&Graph) -> u64) -> RationalPmf {
    let pairs = n * (n - 1) / 2;
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for mask in 0..1u64 << pairs {
        *hist.entry(count(&graph_from_mask(n, mask))).or_insert(0) += 1;
    }
    let den = BigInt::one() << pairs;
    RationalPmf::from_pairs(hist.into_iter().map(|(v, c)| (BigUint::from(v), ratio(c, den.clone()))))
}

#[test]
fn criterion_01_exhaustive_q2_oracle_n4() {
    let start = Instant::now();
    let theory = [
        (Q2Condition::EvenEven, dist_even_even(4).unwrap()),
        (Q2Condition::EvenOdd, dist_even_odd(4).unwrap()),
        (Q2Condition::OddOdd, dist_odd_odd(4).unwrap()),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (cond, pmf) in &theory {
        let hist = exhaustive_histogram(4, |g| q2_subset_oracle(g, *cond));
        let spec = PartitionSpec::q2(*cond);
        let brute = exhaustive_histogram(4, |g| count_good(g, &spec).unwrap());
        let eq = &hist == pmf && &brute == pmf;
        ok &= eq;
        detail.push(format!("{}: {}", cond.as_str(), if eq { "exact" } else { "MISMATCH" }));
    }
    let pass = report(1, "exhaustive q=2 oracle, n=4", ok, &detail.join(", "), start.elapsed(), Duration::from_secs(1));
    assert!(pass);
}

#[test]
fn criterion_02_exhaustive_q2_oracle_n5() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (cond, pmf) in
        [(Q2Condition::EvenEven, dist_even_even(5).unwrap()), (Q2Condition::EvenOdd, dist_even_odd(5).unwrap())]
    {
        let hist = exhaustive_histogram(5, |g| q2_subset_oracle(g, cond));
        let eq = hist == pmf;
        ok &= eq;
        detail.push(format!("{}: {}", cond.as_str(), if eq { "exact" } else { "MISMATCH" }));
    }
    let pass =
        report(2, "exhaustive q=2 oracle, n=5", ok, &detail.join(", "), start.elapsed(), Duration::from_secs(10));
    assert!(pass);
}

#[test]
fn criterion_03_gf2_matches_brute_force() {
    let start = Instant::now();
    let mut compared = 0u64;
    let mut mismatches = 0u64;
    let mut check = |g: &Graph| {
        for cond in Q2Condition::ALL {
            let gf2 = count_partitions_q2(g, cond);
            let brute = BigUint::from(count_good(g, &PartitionSpec::q2(cond)).unwrap());
            compared += 1;
            if gf2 != brute {
                mismatches += 1;
            }
        }
    };
    for n in 1..=4 {
        for mask in 0..1u64 << (n * (n - 1) / 2) {
            check(&graph_from_mask(n, mask));
        }
    }
    let mut rng = rng_from_seed(2024);
    for _ in 0..200 {
        let n = 5 + (rng.next_u64() % 4) as usize;
        check(&Graph::sample_gnp(n, Probability::HALF, rng.next_u64()));
    }
    let detail = format!("{compared} (graph, condition) pairs, {mismatches} mismatches");
    let pass =
        report(3, "GF(2) vs brute-force engines", mismatches == 0, &detail, start.elapsed(), Duration::from_secs(30));
    assert!(pass);
}

/// Rank over GF(2) of rows given as bitmasks.
fn rank_gf2(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn criterion_04_macwilliams_counts() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 1..=4usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let mut hist = vec![0u64; n + 1];
        for mask in 0..1u64 << slots.len() {
            let mut rows = vec![0u64; n];
            for (b, &(i, j)) in slots.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    rows[i] |= 1 << j;
                    rows[j] |= 1 << i;
                }
            }
            hist[rank_gf2(rows)] += 1;
        }
        let matches = (0..=n).all(|r| symmetric_rank_count(n as u32, r as u32).unwrap() == BigUint::from(hist[r]));
        ok &= matches;
        detail.push(format!("n={n}: {hist:?}"));
    }
    let pass =
        report(4, "MacWilliams symmetric rank counts", ok, &detail.join("; "), start.elapsed(), Duration::from_secs(5));
    assert!(pass);
}

/// Order of the subgroup generated by `gens`, by breadth-first closure.
fn closure_size(gens: &[Vec<u32>], q: u32, k: usize) -> u64 {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([vec![0u32; k]]);
    seen.insert(vec![0u32; k]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<u32> = x.iter().zip(g).map(|(a, b)| (a + b) % q).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as u64
}

fn all_vectors(q: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (0..q).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

#[test]
fn criterion_05_solution_counts() {
    let start = Instant::now();
    let mut rng = rng_from_seed(55);
    let mut cases = 0u64;
    let mut bad = Vec::new();
    for q in [2u32, 3, 4, 6] {
        for k in 1..=3usize {
            let points = all_vectors(q, k);
            for _ in 0..50 {
                let l = 1 + (rng.next_u64() % 4) as usize;
                let cols: Vec<Vec<u32>> =
                    (0..l).map(|_| (0..k).map(|_| (rng.next_u64() % q as u64) as u32).collect()).collect();
                let b: Vec<u32> = if rng.next_u64().is_multiple_of(2) {
                    // A consistent right-hand side a0 M.
                    let a0: Vec<u32> = (0..k).map(|_| (rng.next_u64() % q as u64) as u32).collect();
                    cols.iter().map(|c| c.iter().zip(&a0).map(|(x, y)| x * y).sum::<u32>() % q).collect()
                } else {
                    (0..l).map(|_| (rng.next_u64() % q as u64) as u32).collect()
                };
                let brute = points
                    .iter()
                    .filter(|a| {
                        cols.iter()
                            .zip(&b)
                            .all(|(c, &bj)| c.iter().zip(a.iter()).map(|(x, y)| x * y).sum::<u32>() % q == bj)
                    })
                    .count() as u64;
                let index = (q as u64).pow(k as u32) / closure_size(&cols, q, k);
                let lib =
                    count_congruence_solutions(&ModqMatrix::from_columns(q, k, cols.clone()).unwrap(), &b).unwrap();
                cases += 1;
                if !(brute == 0 || brute == index) || lib != brute {
                    bad.push(format!("q={q} k={k} cols={cols:?} b={b:?}: brute {brute}, index {index}, lib {lib}"));
                }
            }
        }
    }
    let detail = format!("{cases} random systems, {} outside {{0, index}}", bad.len());
    let pass = report(
        5,
        "solution counts are 0 or the column index",
        bad.is_empty(),
        &detail,
        start.elapsed(),
        Duration::from_secs(10),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_06_sum_inequality_exhaustive() {
    let start = Instant::now();
    let (q, k) = (3u32, 2usize);
    let representations = combinatorial_subspaces(q, k).unwrap();
    let mut sets = 0u64;
    let mut violations = 0u64;
    let mut equality_mismatch = 0u64;
    let mut equalities = 0u64;
    for mask in 1u64..1 << 9 {
        let l = BoxSet::from_mask(q, k, mask);
        sets += 1;
        // Independent N_c: ambient size over the closure of the incidence columns.
        let sum: u64 =
            l.members().iter().map(|c| 9 / closure_size(incidence_matrix(c, &l).unwrap().columns(), q, k)).sum();
        let lib = verify_sum_inequality(&l).unwrap();
        if sum > 9 || lib.sum != sum {
            violations += 1;
        }
        let detected = is_combinatorial_subspace(&l);
        let represented = representations.contains(&l);
        if (sum == 9) != detected || detected != represented || lib.equality != (sum == 9) {
            equality_mismatch += 1;
        }
        equalities += u64::from(sum == 9);
    }
    let audit = exhaustive_lemma_audit(q, k, AuditMode::Exhaustive).unwrap();
    let ok = sets == 511
        && violations == 0
        && equality_mismatch == 0
        && audit.passed()
        && audit.sets_audited == 511
        && audit.equality_count == equalities
        && audit.representation_count == Some(representations.len() as u64);
    let detail = format!(
        "{sets} sets, {violations} violations, {equalities} equality cases = {} subspaces, {equality_mismatch} mismatches",
        representations.len()
    );
    let pass = report(6, "sum inequality over all L in [3]^2", ok, &detail, start.elapsed(), Duration::from_secs(10));
    assert!(pass);
}

#[test]
fn criterion_07_fourier_exactness() {
    let start = Instant::now();
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for m in 0..=5usize {
        let pairs = all_pairs(m);
        for q in 2..=5u32 {
            let mut hits = vec![0u64; q as usize];
            for mask in 0..1u64 << pairs.len() {
                let mut deg = vec![0u32; m];
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        deg[u] += 1;
                        deg[v] += 1;
                    }
                }
                for x in 0..q {
                    if deg.iter().all(|d| d % q == x) {
                        hits[x as usize] += 1;
                    }
                }
            }
            for x in 0..q {
                let expected = ratio(hits[x as usize], BigInt::one() << pairs.len());
                checked += 1;
                match prob_all_degrees_congruent(m, q, x) {
                    Ok(p) if p == expected => {}
                    Ok(p) => bad.push(format!("m={m} q={q} x={x}: {p} vs {expected}")),
                    Err(e) => bad.push(format!("m={m} q={q} x={x}: {e}")),
                }
            }
        }
    }
    let detail = format!("{checked} (m, q, x) triples, {} mismatches or non-constant remainders", bad.len());
    let pass = report(
        7,
        "cyclotomic probabilities vs enumeration",
        bad.is_empty(),
        &detail,
        start.elapsed(),
        Duration::from_secs(60),
    );
    assert!(pass, "{bad:?}");
}

/// `E[X_n]` for an all-zero spec summed directly over unordered collections
/// of at most three part sizes.
fn composition_moment(n: usize, spec_q: u32) -> BigRational {
    let p: Vec<BigRational> = (0..=n).map(|s| prob_all_degrees_congruent(s, spec_q, 0).unwrap()).collect();
    let fact = |k: usize| BigRational::from_integer((1..=k as u64).fold(BigInt::one(), |a, i| a * i));
    let mut total = BigRational::zero();
    fn walk(left: usize, parts: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if left == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for s in 1..=left {
            acc.push(s);
            walk(left - s, parts - 1, acc, out);
            acc.pop();
        }
    }
    for k in 1..=spec_q as usize {
        let mut comps = Vec::new();
        walk(n, k, &mut Vec::new(), &mut comps);
        for c in comps {
            let mut term = fact(n);
            for &s in &c {
                term = term * &p[s] / fact(s);
            }
            total += term / fact(k);
        }
    }
    total
}

#[test]
fn criterion_08_first_moment_convergence() {
    let start = Instant::now();
    let spec = PartitionSpec::all_zero(3).unwrap();
    let points = [10usize, 20, 30, 40];
    let sixth = ratio(1, 6);
    let mut devs = Vec::new();
    for &n in &points {
        let e = expected_count(n, &spec).unwrap();
        devs.push(((e - &sixth).abs() * ratio(6, 1)).to_f64().unwrap());
    }
    let independent = [10usize, 20].iter().all(|&n| expected_count(n, &spec).unwrap() == composition_moment(n, 3));
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let tolerance = devs[3] < 1e-3;
    let detail = format!(
        "|6E-1| at n=10,20,30,40 = {:.4e}, {:.4e}, {:.4e}, {:.4e}; monotone {}; n=40 below 1e-3: {}; composition cross-check {}",
        devs[0],
        devs[1],
        devs[2],
        devs[3],
        monotone,
        tolerance,
        if independent { "exact" } else { "MISMATCH" }
    );
    let pass = report(
        8,
        "first moment approaches 1/6 for q=3",
        monotone && tolerance && independent,
        &detail,
        start.elapsed(),
        Duration::from_secs(120),
    );
    assert!(pass, "{detail}");
}

#[test]
fn criterion_09_monte_carlo_odd_odd_n24() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(24, PartitionSpec::q2(Q2Condition::OddOdd), 100_000, 0x5eed);
    let empirical = run_trials(&cfg).unwrap();
    let exact = dist_odd_odd(24).unwrap();
    let tv = tv_distance(&empirical, &exact);
    let detail = format!("TV = {tv:.5} over {} trials (threshold 0.02)", empirical.trials);
    let pass = report(
        9,
        "Monte Carlo vs exact odd/odd law, n=24",
        tv < 0.02,
        &detail,
        start.elapsed(),
        Duration::from_secs(60),
    );
    assert!(pass);
}

#[test]
fn criterion_10_limit_laws() {
    let start = Instant::now();
    let gf = generating_function_audit(60).unwrap();
    let z = limit_dist(LimitKind::Z, 40);
    let z_dev = (z.pmf.total() - BigRational::one()).abs();
    let z_ok = z_dev <= ratio(1, BigInt::one() << 60);
    let x40 = limit_dist(LimitKind::X, 40);
    let tv = tv_distance(&dist_even_even(40).unwrap(), &x40);
    let ok = gf.f_at_one_deviation < 1e-12 && gf.f_at_half_deviation < 1e-12 && gf.identity_holds && z_ok && tv < 0.01;
    let detail = format!(
        "|f(1)-1| = {:.2e}, |f(1/2)-2/3| = {:.2e}, identity {}, |Z mass - 1| = {:.2e}, TV(X_40, X) = {tv:.2e}",
        gf.f_at_one_deviation,
        gf.f_at_half_deviation,
        gf.identity_holds,
        z_dev.to_f64().unwrap()
    );
    let pass = report(10, "limit laws and generating function", ok, &detail, start.elapsed(), Duration::from_secs(10));
    assert!(pass);
}

#[test]
fn criterion_11_ordered_partition_count() {
    let start = Instant::now();
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for q in 1..=4u32 {
        for n in 0..=8usize {
            // Functions [n] -> [q] as base-q digits, tallied by preimage sizes.
            let total = (q as u64).pow(n as u32);
            let mut by_sizes: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
            for f in 0..total {
                let mut sizes = vec![0usize; q as usize];
                let mut x = f;
                for _ in 0..n {
                    sizes[(x % q as u64) as usize] += 1;
                    x /= q as u64;
                }
                *by_sizes.entry(sizes).or_insert(0) += 1;
            }
            for c in 0..=q {
                let constrained = (q - c) as usize;
                let direct: u64 =
                    by_sizes.iter().filter(|(s, _)| s[..constrained].iter().all(|x| x % 2 == 0)).map(|(_, &k)| k).sum();
                checked += 1;
                let p = ordered_partition_count(n, q, c).unwrap();
                if p != BigUint::from(direct) {
                    bad.push(format!("n={n} q={q} c={c}: {p} vs {direct}"));
                }
                if c == 0 && n % 2 == 1 && !p.is_zero() {
                    bad.push(format!("odd n={n} q={q} c=0 gives {p}"));
                }
            }
        }
    }
    let detail = format!("{checked} (n, q, c) triples, {} mismatches", bad.len());
    let pass = report(
        11,
        "ordered even-part partition count",
        bad.is_empty(),
        &detail,
        start.elapsed(),
        Duration::from_secs(10),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_12_conflict_bound() {
    let start = Instant::now();
    let r = conflict_bound_check(64).unwrap();
    let mut ok = r.all_hold && r.rows.len() == 62;
    for q in 3..=64u32 {
        let theta = std::f64::consts::TAU / q as f64;
        let modulus = 0.5 * (2.0 + 2.0 * theta.cos()).sqrt();
        ok &= modulus <= (-1.0 / (q * q) as f64).exp();
        ok &= ((std::f64::consts::PI / q as f64).cos() - modulus).abs() < 1e-12;
    }
    let detail = format!("q = 3..64, min slack {:.3e}, max slack {:.3e}", r.min_slack, r.max_slack);
    let pass = report(12, "cos(pi/q) <= exp(-1/q^2)", ok, &detail, start.elapsed(), Duration::from_secs(1));
    assert!(pass);
}
