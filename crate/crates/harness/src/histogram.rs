//! Square grids of counts over residue classes modulo p^k.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Residues mod p^k in refinement order: position i holds the residue whose
/// k base-p digits are those of i reversed, so classes are grouped by their
/// residue mod p, then mod p², and so on.
pub fn refinement_order(p: u64, k: u32) -> Vec<u64> {
    let m = p.pow(k);
    (0..m)
        .map(|i| {
            let (mut i, mut r) = (i, 0);
            for _ in 0..k {
                r = r * p + i % p;
                i /= p;
            }
            r
        })
        .collect()
}

/// Counts indexed by `(a mod p^k, b mod p^k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub p: u64,
    pub depth: u32,
    pub counts: Vec<u64>,
}

impl Grid {
    pub fn new(p: u64, depth: u32) -> Self {
        let side = p.pow(depth) as usize;
        Grid {
            p,
            depth,
            counts: vec![0; side * side],
        }
    }

    pub fn side(&self) -> u64 {
        self.p.pow(self.depth)
    }

    pub fn add(&mut self, a: u64, b: u64) {
        let s = self.side();
        self.counts[((a % s) * s + b % s) as usize] += 1;
    }

    pub fn get(&self, a: u64, b: u64) -> u64 {
        let s = self.side();
        self.counts[(a * s + b) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn merge(&mut self, o: &Grid) {
        for (x, y) in self.counts.iter_mut().zip(&o.counts) {
            *x += y;
        }
    }

    /// CSV in refinement order with the ordering stated in a header comment.
    pub fn to_csv(&self, title: &str, row_label: &str, col_label: &str) -> String {
        let order = refinement_order(self.p, self.depth);
        let mut s = String::new();
        let _ = writeln!(s, "# {title}");
        let _ = writeln!(
            s,
            "# rows: {row_label} mod {}^{}; columns: {col_label} mod {}^{}",
            self.p, self.depth, self.p, self.depth
        );
        let _ = writeln!(
            s,
            "# ordering: position i holds the residue whose {} base-{} digits are those of i reversed \
             (grouped by residue mod {}, then mod {}^2, ...; for p = 2 the even classes come first)",
            self.depth, self.p, self.p, self.p
        );
        s.push_str(row_label);
        for &b in &order {
            let _ = write!(s, ",{b}");
        }
        s.push('\n');
        for &a in &order {
            let _ = write!(s, "{a}");
            for &b in &order {
                let _ = write!(s, ",{}", self.get(a, b));
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_classes_first() {
        let o = refinement_order(2, 3);
        assert_eq!(o, vec![0, 4, 2, 6, 1, 5, 3, 7]);
        let o = refinement_order(3, 2);
        assert_eq!(o, vec![0, 3, 6, 1, 4, 7, 2, 5, 8]);
    }

    #[test]
    fn empty_grid_is_zero() {
        let g = Grid::new(2, 5);
        assert_eq!(g.counts.len(), 1024);
        assert_eq!(g.total(), 0);
        let csv = g.to_csv("t", "a", "b");
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 33);
    }

    #[test]
    fn csv_places_counts() {
        let mut g = Grid::new(2, 1);
        g.add(1, 0);
        g.add(3, 2);
        let csv = g.to_csv("t", "x", "y");
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, vec!["x,0,1", "0,0,0", "1,2,0"]);
    }
}
