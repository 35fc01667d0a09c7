//! Loop-free multigraphs with prescribed vertex degrees.

/// Multigraph on `n` vertices; `lines[index(i, j)]` is the multiplicity of
/// the line between `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    vertices: usize,
    lines: Vec<u32>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl Multigraph {
    pub fn empty(vertices: usize) -> Self {
        Self { vertices, lines: vec![0; vertices * vertices.saturating_sub(1) / 2] }
    }

    pub fn from_lines(vertices: usize, lines: &[((usize, usize), u32)]) -> Self {
        let mut g = Self::empty(vertices);
        for &((i, j), l) in lines {
            g.set(i, j, l);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn lines(&self, i: usize, j: usize) -> u32 {
        if i == j {
            return 0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.lines[pair_index(self.vertices, a, b)]
    }

    pub fn set(&mut self, i: usize, j: usize, l: u32) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let n = self.vertices;
        self.lines[pair_index(n, a, b)] = l;
    }

    pub fn degree(&self, i: usize) -> u32 {
        (0..self.vertices).map(|j| self.lines(i, j)).sum()
    }

    pub fn line_count(&self) -> u32 {
        self.lines.iter().sum()
    }

    /// Nonzero multiplicities as `((i, j), l)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        let n = self.vertices;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .map(move |(i, j)| ((i, j), self.lines(i, j)))
            .filter(|&(_, l)| l > 0)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices;
        if n <= 1 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for ((i, j), _) in self.edges() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
                components -= 1;
            }
        }
        components == 1
    }
}

/// All loop-free multigraphs whose vertex degrees equal `degrees`, in
/// lexicographic order of the multiplicity vector.
pub fn enumerate_graphs(degrees: &[u32]) -> Vec<Multigraph> {
    let n = degrees.len();
    let total: u32 = degrees.iter().sum();
    let mut out = Vec::new();
    if total % 2 == 1 {
        return out;
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut remaining = degrees.to_vec();
    let mut g = Multigraph::empty(n);
    backtrack(&pairs, 0, &mut remaining, &mut g, &mut out);
    out
}

fn backtrack(
    pairs: &[(usize, usize)],
    k: usize,
    remaining: &mut [u32],
    g: &mut Multigraph,
    out: &mut Vec<Multigraph>,
) {
    if k == pairs.len() {
        if remaining.iter().all(|&r| r == 0) {
            out.push(g.clone());
        }
        return;
    }
    let (i, j) = pairs[k];
    let n = remaining.len();
    // the last pair touching i must exhaust it
    let closes_i = j == n - 1;
    let hi = remaining[i].min(remaining[j]);
    let lo = if closes_i { remaining[i] } else { 0 };
    if lo > hi {
        return;
    }
    if !closes_i {
        let later: u32 = remaining[j..].iter().sum();
        if remaining[i] > later {
            return;
        }
    }
    for l in lo..=hi {
        remaining[i] -= l;
        remaining[j] -= l;
        g.set(i, j, l);
        backtrack(pairs, k + 1, remaining, g, out);
        remaining[i] += l;
        remaining[j] += l;
    }
    g.set(i, j, 0);
}

/// Number of leg pairings realising `g`: `Π aᵢ! / Π l_ij!`.
pub fn combinatorial_factor(g: &Multigraph, powers: &[u32]) -> f64 {
    let num: f64 = powers.iter().map(|&a| factorial(a)).product();
    let den: f64 = g.edges().map(|(_, l)| factorial(l)).product();
    num / den
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degree_sequences() {
        let g = enumerate_graphs(&[1, 1]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].lines(0, 1), 1);
        let g = enumerate_graphs(&[2, 2]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].lines(0, 1), 2);
        let g = enumerate_graphs(&[2, 2, 2]);
        assert_eq!(g.len(), 1);
        assert_eq!((g[0].lines(0, 1), g[0].lines(0, 2), g[0].lines(1, 2)), (1, 1, 1));
        assert!(enumerate_graphs(&[1, 2]).is_empty());
        assert!(enumerate_graphs(&[1, 3]).is_empty());
        assert_eq!(enumerate_graphs(&[1, 1, 1, 1]).len(), 3);
        assert_eq!(enumerate_graphs(&[]).len(), 1);
        assert_eq!(enumerate_graphs(&[0]).len(), 1);
        assert!(enumerate_graphs(&[2]).is_empty());
    }

    #[test]
    fn weights_match_leg_counts() {
        let g = Multigraph::from_lines(2, &[((0, 1), 2)]);
        assert_eq!(combinatorial_factor(&g, &[2, 2]), 2.0);
        let g = Multigraph::from_lines(2, &[((0, 1), 4)]);
        assert_eq!(combinatorial_factor(&g, &[4, 4]), 24.0);
    }

    #[test]
    fn connectivity() {
        assert!(Multigraph::from_lines(3, &[((0, 1), 1), ((1, 2), 2)]).is_connected());
        assert!(!Multigraph::from_lines(4, &[((0, 1), 1), ((2, 3), 1)]).is_connected());
        assert!(!Multigraph::empty(2).is_connected());
    }
}
