use super::partition::Partition;

/// Littlewood–Richardson coefficient `c^ν_{λμ}`: the number of skew
/// tableaux of shape `ν/λ` and content `μ` that are semistandard and whose
/// reverse reading word is a lattice word.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if nu.size() != lambda.size() + mu.size() || !nu.contains(lambda) {
        return 0;
    }
    if !nu.contains(mu) {
        return 0;
    }
    let cells: Vec<(usize, usize)> = (0..nu.rows())
        .flat_map(|i| (lambda.part(i)..nu.part(i)).rev().map(move |j| (i, j)))
        .collect();
    let mut filling: Vec<Vec<usize>> = (0..nu.rows()).map(|i| vec![0; nu.part(i)]).collect();
    let mut counts = vec![0usize; mu.rows()];
    let mut total = 0;
    fill(&cells, 0, lambda, mu, &mut filling, &mut counts, &mut total);
    total
}

fn fill(
    cells: &[(usize, usize)],
    pos: usize,
    lambda: &Partition,
    mu: &Partition,
    filling: &mut [Vec<usize>],
    counts: &mut [usize],
    total: &mut u64,
) {
    if pos == cells.len() {
        *total += 1;
        return;
    }
    let (i, j) = cells[pos];
    for v in 1..=mu.rows() {
        if counts[v - 1] >= mu.part(v - 1) {
            continue;
        }
        if v > 1 && counts[v - 1] + 1 > counts[v - 2] {
            continue;
        }
        if j + 1 < filling[i].len() && filling[i][j + 1] < v {
            continue;
        }
        if i > 0 && j >= lambda.part(i - 1) && filling[i - 1][j] >= v {
            continue;
        }
        filling[i][j] = v;
        counts[v - 1] += 1;
        fill(cells, pos + 1, lambda, mu, filling, counts, total);
        counts[v - 1] -= 1;
        filling[i][j] = 0;
    }
}
