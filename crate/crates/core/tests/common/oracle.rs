//! Brute-force references. Nothing here calls the library's information
//! measures, common-part code or optimizers; pmfs are read as flat tables.

use infomono::JointPmf;

pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

pub fn unravel(sizes: &[usize], mut i: usize) -> Vec<usize> {
    let mut s = vec![0; sizes.len()];
    for a in (0..sizes.len()).rev() {
        s[a] = i % sizes[a];
        i /= sizes[a];
    }
    s
}

/// Marginal over `coords` of the table `probs` with shape `sizes`, after
/// appending `extra[i]` (a label with `extra_size` values) to cell `i`.
fn marginal_with(
    sizes: &[usize],
    probs: &[f64],
    coords: &[usize],
    extra: Option<(&[usize], usize)>,
) -> Vec<f64> {
    let k = sizes.len();
    let size_of = |c: usize| {
        if c == k {
            extra.map_or(1, |e| e.1)
        } else {
            sizes[c]
        }
    };
    let n: usize = coords.iter().map(|&c| size_of(c)).product();
    let mut out = vec![0.0; n];
    for (i, &v) in probs.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let s = unravel(sizes, i);
        let mut idx = 0;
        for &c in coords {
            let x = if c == k {
                extra.map_or(0, |e| e.0[i])
            } else {
                s[c]
            };
            idx = idx * size_of(c) + x;
        }
        out[idx] += v;
    }
    out
}

pub fn h(p: &JointPmf, coords: &[usize]) -> f64 {
    entropy(&marginal_with(p.sizes(), p.probs(), coords, None))
}

/// `Σ_a H(X_a) − H(X_A)`.
pub fn total_correlation(p: &JointPmf) -> f64 {
    let k = p.num_coords();
    (0..k).map(|a| h(p, &[a])).sum::<f64>() - entropy(p.probs())
}

/// Total correlation given a deterministic label of each cell.
pub fn tc_given_labels(p: &JointPmf, labels: &[usize], n_labels: usize) -> f64 {
    let k = p.num_coords();
    let hq = entropy(&marginal_with(
        p.sizes(),
        p.probs(),
        &[k],
        Some((labels, n_labels)),
    ));
    let parts: f64 = (0..k)
        .map(|a| {
            entropy(&marginal_with(
                p.sizes(),
                p.probs(),
                &[a, k],
                Some((labels, n_labels)),
            )) - hq
        })
        .sum();
    parts - (entropy(p.probs()) - hq)
}

/// All set partitions of `n` items as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            go(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut prefix = vec![0];
    go(&mut prefix, 0, n, &mut out);
    out
}

fn blocks(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Support cells of `p` in flat order.
pub fn support(p: &JointPmf) -> Vec<usize> {
    (0..p.len()).filter(|&i| p.probs()[i] > 0.0).collect()
}

/// Is `f(cell)` a function of coordinate `b` alone on the support?
fn is_function_of(p: &JointPmf, cell_label: &[Option<usize>], b: usize) -> bool {
    let mut seen: Vec<Option<usize>> = vec![None; p.sizes()[b]];
    for i in support(p) {
        let x = unravel(p.sizes(), i)[b];
        let l = cell_label[i].expect("support cell labeled");
        match seen[x] {
            None => seen[x] = Some(l),
            Some(v) if v != l => return false,
            _ => {}
        }
    }
    true
}

/// Maximal common function by exhaustive search: every partition of the
/// positive-probability symbols of coordinate 0 is tried, the ones that are
/// also functions of every other coordinate are kept, and the one with the
/// most blocks is returned as per-cell labels (`None` off the support).
/// Panics if the finest valid partition does not refine every other valid
/// one, which would contradict the lattice structure of common functions.
pub fn gk_brute_force(p: &JointPmf) -> Vec<Option<usize>> {
    let sizes = p.sizes();
    let m0 = marginal_with(sizes, p.probs(), &[0], None);
    let symbols: Vec<usize> = (0..sizes[0]).filter(|&x| m0[x] > 0.0).collect();
    let mut valid: Vec<Vec<Option<usize>>> = Vec::new();
    for part in set_partitions(symbols.len()) {
        let mut of_symbol = vec![None; sizes[0]];
        for (j, &x) in symbols.iter().enumerate() {
            of_symbol[x] = Some(part[j]);
        }
        let cell_label: Vec<Option<usize>> = (0..p.len())
            .map(|i| {
                if p.probs()[i] > 0.0 {
                    of_symbol[unravel(sizes, i)[0]]
                } else {
                    None
                }
            })
            .collect();
        if (1..p.num_coords()).all(|b| is_function_of(p, &cell_label, b)) {
            valid.push(cell_label);
        }
    }
    let count = |l: &Vec<Option<usize>>| l.iter().flatten().max().map_or(0, |m| m + 1);
    let finest = valid
        .iter()
        .max_by_key(|l| count(l))
        .expect("constant labeling is valid")
        .clone();
    for other in &valid {
        assert!(
            refines(&finest, other),
            "finest common labeling is not unique"
        );
    }
    finest
}

/// Does `fine` refine `coarse` on the cells both label?
pub fn refines(fine: &[Option<usize>], coarse: &[Option<usize>]) -> bool {
    let mut map = std::collections::HashMap::new();
    fine.iter().zip(coarse).all(|(f, c)| match (f, c) {
        (Some(f), Some(c)) => *map.entry(*f).or_insert(*c) == *c,
        _ => true,
    })
}

/// Same partition of the support cells.
pub fn same_partition(a: &[Option<usize>], b: &[usize], support: &[usize]) -> bool {
    let a: Vec<Option<usize>> = support.iter().map(|&i| a[i]).collect();
    let b: Vec<Option<usize>> = support.iter().map(|&i| Some(b[i])).collect();
    refines(&a, &b) && refines(&b, &a)
}

/// Minimum residual total correlation over every coarsening of the
/// brute-force common part.
pub fn delta1_by_coarsening(p: &JointPmf) -> f64 {
    let common = gk_brute_force(p);
    let n = common.iter().flatten().max().map_or(0, |m| m + 1);
    set_partitions(n)
        .iter()
        .map(|merge| {
            let labels: Vec<usize> = common.iter().map(|c| c.map_or(0, |c| merge[c])).collect();
            tc_given_labels(p, &labels, blocks(merge).max(1))
        })
        .fold(f64::INFINITY, f64::min)
}

/// `min H(Q|X_a)` over deterministic `Q` of the other parties' joint
/// symbol that are functions of each other party alone and leave no
/// residual total correlation. `None` when no such `Q` exists.
pub fn delta2_intercept_by_enumeration(p: &JointPmf, a: usize) -> Option<f64> {
    let k = p.num_coords();
    let sizes = p.sizes();
    let rest: Vec<usize> = (0..k).filter(|&b| b != a).collect();
    let m_rest = marginal_with(sizes, p.probs(), &rest, None);
    let rest_symbols: Vec<usize> = (0..m_rest.len()).filter(|&r| m_rest[r] > 0.0).collect();
    let rest_index = |s: &[usize]| rest.iter().fold(0, |acc, &b| acc * sizes[b] + s[b]);
    let mut best: Option<f64> = None;
    for part in set_partitions(rest_symbols.len()) {
        let mut of_rest = vec![0; m_rest.len()];
        for (j, &r) in rest_symbols.iter().enumerate() {
            of_rest[r] = part[j];
        }
        let cell_label: Vec<Option<usize>> = (0..p.len())
            .map(|i| {
                if p.probs()[i] > 0.0 {
                    Some(of_rest[rest_index(&unravel(sizes, i))])
                } else {
                    None
                }
            })
            .collect();
        if !rest.iter().all(|&b| is_function_of(p, &cell_label, b)) {
            continue;
        }
        let labels: Vec<usize> = cell_label.iter().map(|l| l.unwrap_or(0)).collect();
        let nq = blocks(&part).max(1);
        if tc_given_labels(p, &labels, nq) > 1e-9 {
            continue;
        }
        let h_q_given_a = entropy(&marginal_with(
            sizes,
            p.probs(),
            &[a, k],
            Some((&labels, nq)),
        )) - h(p, &[a]);
        best = Some(best.map_or(h_q_given_a, |b: f64| b.min(h_q_given_a)));
    }
    best
}

/// Pattern search over a parameter vector; `f` returns `None` outside the
/// feasible set. Moves of size `step` along every coordinate, halving the
/// step when no move helps or after 64 sweeps at one size. After an improving sweep the whole displacement
/// is repeated, doubling each time, for as long as it keeps helping.
fn pattern_search(
    mut x: Vec<f64>,
    mut fx: f64,
    mut step: f64,
    f: &dyn Fn(&[f64]) -> Option<f64>,
) -> f64 {
    let mut sweeps = 0;
    while step > 1e-9 {
        let start = x.clone();
        sweeps += 1;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += sign * step;
                if let Some(fy) = f(&y) {
                    if fy < fx - 1e-15 {
                        x = y;
                        fx = fy;
                    }
                }
            }
        }
        if x == start || sweeps > 64 {
            step /= 2.0;
            sweeps = 0;
            if x == start {
                continue;
            }
        }
        let mut delta: Vec<f64> = x.iter().zip(&start).map(|(a, b)| a - b).collect();
        loop {
            let y: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
            match f(&y) {
                Some(fy) if fy < fx - 1e-15 => {
                    x = y;
                    fx = fy;
                    delta.iter_mut().for_each(|d| *d *= 2.0);
                }
                _ => break,
            }
        }
    }
    fx
}

/// Keeps the `n` lowest `(value, params)` pairs.
fn keep_best(best: &mut Vec<(f64, Vec<f64>)>, v: f64, x: &[f64], n: usize) {
    if best.len() < n || v < best[best.len() - 1].0 {
        best.push((v, x.to_vec()));
        best.sort_by(|a, b| a.0.total_cmp(&b.0));
        best.truncate(n);
    }
}

/// Wyner common information of a 2×2 pmf over decompositions
/// `p = Σ_q π_q · Bern(a_q) ⊗ Bern(b_q)` with at most three components.
/// Components one and two are gridded and the third is solved in closed
/// form from the marginal and joint constraints; the best grid points are
/// refined by pattern search.
pub fn wyner_2x2(p: &JointPmf) -> f64 {
    assert_eq!(p.sizes(), &[2, 2]);
    let pr = p.probs();
    let (m1, m2, p11) = (pr[2] + pr[3], pr[1] + pr[3], pr[3]);
    let hx = entropy(pr);
    let in01 = |v: f64| (-1e-12..=1.0 + 1e-12).contains(&v);
    let hb = |v: f64| binary_entropy(v.clamp(0.0, 1.0));

    // params: a1, b1, a2, b2, π1; π2 and the third component are solved
    let value = |x: &[f64]| -> Option<f64> {
        let (a1, b1, a2, b2, pi1) = (x[0], x[1], x[2], x[3], x[4]);
        if ![a1, b1, a2, b2, pi1]
            .iter()
            .all(|&v| (0.0..=1.0).contains(&v))
        {
            return None;
        }
        let u0 = 1.0 - pi1;
        let (c0, a0, bb0) = (p11 - pi1 * a1 * b1, m1 - pi1 * a1, m2 - pi1 * b1);
        let den = c0 + a2 * b2 * u0 - a0 * b2 - bb0 * a2;
        let t = if den.abs() > 1e-14 {
            (c0 * u0 - a0 * bb0) / den
        } else {
            return None;
        };
        if !(-1e-12..=u0 + 1e-12).contains(&t) {
            return None;
        }
        let t = t.clamp(0.0, u0);
        let u = u0 - t;
        let (ra, rb) = (a0 - t * a2, bb0 - t * b2);
        let (a3, b3) = if u > 1e-12 {
            (ra / u, rb / u)
        } else if ra.abs() < 1e-9 && rb.abs() < 1e-9 && (c0 - t * a2 * b2).abs() < 1e-9 {
            (0.5, 0.5)
        } else {
            return None;
        };
        if !in01(a3) || !in01(b3) {
            return None;
        }
        let cond = pi1 * (hb(a1) + hb(b1)) + t * (hb(a2) + hb(b2)) + u * (hb(a3) + hb(b3));
        Some(hx - cond)
    };

    let n = 20;
    let g = |i: usize| i as f64 / n as f64;
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    for i1 in 0..=n {
        for j1 in 0..=n {
            for i2 in 0..=n {
                for j2 in 0..=n {
                    for k1 in 0..=n {
                        let x = [g(i1), g(j1), g(i2), g(j2), g(k1)];
                        if let Some(v) = value(&x) {
                            keep_best(&mut best, v, &x, 12);
                        }
                    }
                }
            }
        }
    }
    // X_A itself is always a valid decomposition
    let mut out = hx;
    for (v, x) in best {
        out = out.min(pattern_search(x, v, 1.0 / n as f64, &value));
    }
    out
}

/// `λ · (I(X2;Q|X1), I(X1;Q|X2), I(X1;X2|Q))` for a 2×2 pmf and a channel
/// given as rows of `q` probabilities.
pub fn region_objective(p: &JointPmf, lambda: &[f64; 3], rows: &[Vec<f64>]) -> f64 {
    let q = rows[0].len();
    let pr = p.probs();
    let mut x1q = vec![0.0; 2 * q];
    let mut x2q = vec![0.0; 2 * q];
    let mut qm = vec![0.0; q];
    let mut full = vec![0.0; 4 * q];
    for x in 0..4 {
        for (j, &w) in rows[x].iter().enumerate() {
            let v = pr[x] * w;
            full[x * q + j] = v;
            x1q[(x / 2) * q + j] += v;
            x2q[(x % 2) * q + j] += v;
            qm[j] += v;
        }
    }
    let (h12, h1, h2) = (
        entropy(pr),
        entropy(&[pr[0] + pr[1], pr[2] + pr[3]]),
        entropy(&[pr[0] + pr[2], pr[1] + pr[3]]),
    );
    let (h1q, h2q, hq, h12q) = (entropy(&x1q), entropy(&x2q), entropy(&qm), entropy(&full));
    lambda[0] * (h12 + h1q - h12q - h1)
        + lambda[1] * (h12 + h2q - h12q - h2)
        + lambda[2] * (h1q + h2q - h12q - hq)
}

/// Points of the simplex in `q` dimensions with coordinates in multiples of
/// `1/n`.
fn simplex_grid(q: usize, n: usize) -> Vec<Vec<f64>> {
    fn go(q: usize, left: usize, n: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if q == 1 {
            cur.push(left as f64 / n as f64);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for i in 0..=left {
            cur.push(i as f64 / n as f64);
            go(q - 1, left - i, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(q, n, n, &mut Vec::new(), &mut out);
    out
}

/// Lower support value of the region of a 2×2 pmf over channels with `q`
/// outputs: a grid over the four rows, then pattern search that moves mass
/// between two entries of one row.
pub fn support_2x2(p: &JointPmf, lambda: &[f64; 3], q: usize) -> f64 {
    assert_eq!(p.sizes(), &[2, 2]);
    let n = if q == 2 { 20 } else { 6 };
    let row_grid = simplex_grid(q, n);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let r = row_grid.len();
    for i in 0..r.pow(4) {
        let rows =
            [i % r, (i / r) % r, (i / r / r) % r, i / r / r / r].map(|j| row_grid[j].clone());
        let v = region_objective(p, lambda, &rows);
        let flat: Vec<f64> = rows.concat();
        keep_best(&mut best, v, &flat, 8);
    }
    // pattern coordinates: for each row and each pair (i, j), the mass moved from i to j
    let pairs: Vec<(usize, usize, usize)> = (0..4)
        .flat_map(|x| (0..q).flat_map(move |i| (i + 1..q).map(move |j| (x, i, j))))
        .collect();
    let mut out = f64::INFINITY;
    for (v, base) in best {
        let f = |d: &[f64]| -> Option<f64> {
            let mut flat = base.clone();
            for (&(x, i, j), &m) in pairs.iter().zip(d) {
                flat[x * q + i] -= m;
                flat[x * q + j] += m;
            }
            if flat.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return None;
            }
            let rows: Vec<Vec<f64>> = flat.chunks(q).map(<[f64]>::to_vec).collect();
            Some(region_objective(p, lambda, &rows))
        };
        out = out.min(pattern_search(
            vec![0.0; pairs.len()],
            v,
            1.0 / n as f64,
            &f,
        ));
    }
    out
}

/// Minimum of [`support_2x2`] over two and three channel outputs.
pub fn support_2x2_upto3(p: &JointPmf, lambda: &[f64; 3]) -> f64 {
    support_2x2(p, lambda, 2).min(support_2x2(p, lambda, 3))
}

pub fn total_variation_distance(p: &JointPmf, q: &JointPmf) -> f64 {
    p.probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0
}
