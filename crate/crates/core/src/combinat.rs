//! Small enumeration helpers: factorials, permutations, compositions.

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot has a successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// All vectors of `r` nonnegative integers summing to `k`.
pub fn compositions(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(left - c, slots - 1, cur, out);
            cur.pop();
        }
    }
    if r == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(k, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Number of weak compositions of `k` into `r` parts, `C(k + r − 1, r − 1)`.
pub fn composition_count(k: usize, r: usize) -> f64 {
    if r == 0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    binomial(k + r - 1, r - 1)
}

/// `Σ_{n > k} e^{-1}/n!`, summed directly so that it is accurate far below
/// machine epsilon relative to 1.
pub fn poisson1_tail(k: usize) -> f64 {
    let mut term = (-1.0f64).exp() / factorial(k);
    let mut sum = 0.0;
    for n in k + 1.. {
        term /= n as f64;
        if term < sum * 1e-17 || term == 0.0 {
            break;
        }
        sum += term;
    }
    sum
}

/// Poisson(1) probabilities `e^{-1}/n!` for `n = 0..=k`.
pub fn poisson1_pmf(k: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(k + 1);
    let mut term = (-1.0f64).exp();
    w.push(term);
    for n in 1..=k {
        term /= n as f64;
        w.push(term);
    }
    w
}
