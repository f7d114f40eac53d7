//! Euclidean-ball lattice `{n ∈ Z² : |n| ≤ N}` in lexicographic order.

/// Largest `h ≥ 0` with `h² ≤ v`.
pub(crate) fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut h = (v as f64).sqrt() as i64;
    while h * h > v {
        h -= 1;
    }
    while (h + 1) * (h + 1) <= v {
        h += 1;
    }
    h
}

/// Lattice points of the closed disk of radius `cutoff`, sorted by `(n1, n2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    cutoff: u32,
    points: Vec<[i32; 2]>,
    row_start: Vec<usize>,
    row_half: Vec<i32>,
}

impl Lattice {
    pub fn new(cutoff: u32) -> Self {
        let n = cutoff as i64;
        let mut points = Vec::new();
        let mut row_start = Vec::with_capacity(2 * cutoff as usize + 1);
        let mut row_half = Vec::with_capacity(2 * cutoff as usize + 1);
        for n1 in -n..=n {
            let h = isqrt(n * n - n1 * n1);
            row_start.push(points.len());
            row_half.push(h as i32);
            for n2 in -h..=h {
                points.push([n1 as i32, n2 as i32]);
            }
        }
        Self {
            cutoff,
            points,
            row_start,
            row_half,
        }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[i32; 2]] {
        &self.points
    }

    /// Half width of the row `n1`, i.e. the largest admissible `|n2|`.
    pub fn row_half_width(&self, n1: i32) -> Option<i32> {
        let r = n1 + self.cutoff as i32;
        if r < 0 || r as usize >= self.row_half.len() {
            return None;
        }
        Some(self.row_half[r as usize])
    }

    /// Position of `n` in [`Lattice::points`].
    #[inline]
    pub fn index(&self, n: [i32; 2]) -> Option<usize> {
        let r = n[0] + self.cutoff as i32;
        if r < 0 || r as usize >= self.row_half.len() {
            return None;
        }
        let h = self.row_half[r as usize];
        if n[1].abs() > h {
            return None;
        }
        Some(self.row_start[r as usize] + (n[1] + h) as usize)
    }

    /// `|n|²` for every point.
    pub fn norms_sq(&self) -> Vec<i64> {
        self.points.iter().map(|&n| norm_sq(n)).collect()
    }
}

#[inline]
pub fn norm_sq(n: [i32; 2]) -> i64 {
    let a = n[0] as i64;
    let b = n[1] as i64;
    a * a + b * b
}

/// Cutoff-independent enumeration of `Z²` by square shells; shell `r` holds the `8r`
/// points with `max(|n1|, |n2|) = r`.
pub(crate) fn shell_point(r: i32, p: i32) -> [i32; 2] {
    if r == 0 {
        return [0, 0];
    }
    let side = p / (2 * r);
    let off = p % (2 * r);
    match side {
        0 => [r, -r + 1 + off],
        1 => [r - 1 - off, r],
        2 => [-r, r - 1 - off],
        _ => [-r + 1 + off, -r],
    }
}

/// Position of `n` in the shell enumeration.
pub(crate) fn shell_index(n: [i32; 2]) -> u64 {
    let r = n[0].abs().max(n[1].abs());
    if r == 0 {
        return 0;
    }
    let base = ((2 * r as i64 - 1) * (2 * r as i64 - 1)) as u64;
    let two_r = 2 * r;
    let p = if n[0] == r && n[1] > -r {
        n[1] + r - 1
    } else if n[1] == r && n[0] < r {
        two_r + (r - 1 - n[0])
    } else if n[0] == -r && n[1] < r {
        2 * two_r + (r - 1 - n[1])
    } else {
        3 * two_r + (n[0] + r - 1)
    };
    base + p as u64
}
