use super::Real;

/// Normalized pixel locations of an `h x w` raster, row-major.
///
/// Pixel `(r, c)` maps to `(c / (w - 1), r / (h - 1))`, so both ends of each
/// axis are included. A one-pixel axis maps to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateGrid {
    h: usize,
    w: usize,
    coords: Vec<[f64; 2]>,
}

impl CoordinateGrid {
    pub fn new(h: usize, w: usize) -> Self {
        let mut coords = Vec::with_capacity(h * w);
        for r in 0..h {
            let y = axis(r, h);
            for c in 0..w {
                coords.push([axis(c, w), y]);
            }
        }
        Self { h, w, coords }
    }

    /// Rows `rows.start..rows.end` of an `h x w` grid.
    pub fn rows(h: usize, w: usize, rows: std::ops::Range<usize>) -> Self {
        let mut coords = Vec::with_capacity(rows.len() * w);
        for r in rows.clone() {
            let y = axis(r, h);
            for c in 0..w {
                coords.push([axis(c, w), y]);
            }
        }
        Self {
            h: rows.len(),
            w,
            coords,
        }
    }

    pub fn from_coords(coords: Vec<[f64; 2]>) -> Self {
        Self {
            h: coords.len(),
            w: 1,
            coords,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Flat `n x 2` network input.
    pub fn to_input<T: Real>(&self) -> Vec<T> {
        self.coords
            .iter()
            .flat_map(|&[x, y]| [T::of(x), T::of(y)])
            .collect()
    }
}

fn axis(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_inclusive() {
        let g = CoordinateGrid::new(3, 5);
        assert_eq!(g.len(), 15);
        assert_eq!(g.coords()[0], [0.0, 0.0]);
        assert_eq!(g.coords()[4], [1.0, 0.0]);
        assert_eq!(g.coords()[14], [1.0, 1.0]);
        assert_eq!(g.coords()[7], [0.5, 0.5]);
    }

    #[test]
    fn degenerate_axes_map_to_zero() {
        let g = CoordinateGrid::new(1, 1);
        assert_eq!(g.coords(), &[[0.0, 0.0]]);
        let g = CoordinateGrid::new(1, 3);
        assert_eq!(g.coords()[2], [1.0, 0.0]);
        let g = CoordinateGrid::new(4, 1);
        assert_eq!(g.coords()[3], [0.0, 1.0]);
    }

    #[test]
    fn row_slices_match_full_grid() {
        let full = CoordinateGrid::new(7, 5);
        let part = CoordinateGrid::rows(7, 5, 2..5);
        assert_eq!(part.coords(), &full.coords()[10..25]);
    }
}
