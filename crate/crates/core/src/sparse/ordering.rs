/// Nested-dissection ordering for unknowns living on a 2D index lattice
/// with 5-point coupling: each box is split by one lattice line, which is
/// a separator for that stencil. Returns `perm` with `perm[new] = old`.
pub fn nested_dissection(coords: &[(i64, i64)]) -> Vec<usize> {
    let mut out = Vec::with_capacity(coords.len());
    let nodes: Vec<usize> = (0..coords.len()).collect();
    dissect(nodes, coords, &mut out);
    out
}

const LEAF: usize = 48;

fn dissect(nodes: Vec<usize>, coords: &[(i64, i64)], out: &mut Vec<usize>) {
    if nodes.len() <= LEAF {
        out.extend(nodes);
        return;
    }
    let (mut i0, mut i1, mut j0, mut j1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for &n in &nodes {
        let (i, j) = coords[n];
        i0 = i0.min(i);
        i1 = i1.max(i);
        j0 = j0.min(j);
        j1 = j1.max(j);
    }
    let split_i = i1 - i0 >= j1 - j0;
    let mid = if split_i {
        (i0 + i1) / 2
    } else {
        (j0 + j1) / 2
    };
    let key = |n: usize| if split_i { coords[n].0 } else { coords[n].1 };
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut sep = Vec::new();
    for n in nodes {
        match key(n).cmp(&mid) {
            std::cmp::Ordering::Less => lo.push(n),
            std::cmp::Ordering::Greater => hi.push(n),
            std::cmp::Ordering::Equal => sep.push(n),
        }
    }
    dissect(lo, coords, out);
    dissect(hi, coords, out);
    out.extend(sep);
}
