use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::tables::fmt17;
use super::Part;
use crate::error::Result;
use crate::grid::PhaseField;

/// 8-bit grayscale image of one part of a field. Columns run along `q`
/// (increasing to the right), rows along `p` (largest `p` on top).
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub min: f64,
    pub max: f64,
    pub part: Part,
}

impl Heatmap {
    /// Linear map `[min, max] -> [0, 255]`; a constant field maps to 0.
    pub fn new(field: &PhaseField, part: Part) -> Self {
        let (w, h) = (field.grid.n(), field.grid.m());
        let vals: Vec<f64> = field.values.iter().map(|&v| part.of(v)).collect();
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        let mut pixels = vec![0u8; w * h];
        for row in 0..h {
            let j = h - 1 - row;
            for i in 0..w {
                let v = vals[i * h + j];
                pixels[row * w + i] = if span > 0.0 {
                    ((v - min) / span * 255.0).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                };
            }
        }
        Self {
            width: w,
            height: h,
            pixels,
            min,
            max,
            part,
        }
    }

    /// Binary PGM (`P5`, maxval 255).
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)?;
        w.flush()?;
        Ok(())
    }

    /// Sidecar text recording the value range behind the gray levels.
    pub fn metadata(&self, field: &PhaseField) -> String {
        let g = &field.grid;
        format!(
            "tag={}\npart={}\nmin={}\nmax={}\nwidth={}\nheight={}\nq_min={}\nq_max={}\np_min={}\np_max={}\n",
            field.tag(),
            self.part,
            fmt17(self.min),
            fmt17(self.max),
            self.width,
            self.height,
            fmt17(g.q.min),
            fmt17(g.q.max()),
            fmt17(g.p.min),
            fmt17(g.p.max()),
        )
    }
}

/// `<path>.meta.txt`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.txt");
    PathBuf::from(s)
}

/// Writes the PGM and its sidecar; returns the sidecar path.
pub fn save_heatmap(field: &PhaseField, part: Part, path: impl AsRef<Path>) -> Result<PathBuf> {
    let path = path.as_ref();
    let hm = Heatmap::new(field, part);
    hm.write_pgm(BufWriter::new(File::create(path)?))?;
    let side = sidecar_path(path);
    std::fs::write(&side, hm.metadata(field))?;
    Ok(side)
}

/// Number of iso-levels in contour exports.
pub const CONTOUR_LEVELS: usize = 9;

/// `count` levels evenly spaced strictly inside `(min, max)`.
pub fn contour_levels(min: f64, max: f64, count: usize) -> Vec<f64> {
    let step = (max - min) / (count + 1) as f64;
    (1..=count).map(|k| min + k as f64 * step).collect()
}

/// One iso-line of a field part.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub level_index: usize,
    pub level: f64,
    pub closed: bool,
    pub points: Vec<(f64, f64)>,
}

/// Grid edge: `(i, j, 0)` joins `(i, j)-(i+1, j)`, `(i, j, 1)` joins `(i, j)-(i, j+1)`.
type EdgeKey = (usize, usize, u8);

/// Marching squares over the `(q, p)` lattice with saddle cells resolved
/// by the cell-center average; segments are chained into polylines.
pub fn contour_polylines(field: &PhaseField, part: Part, levels: &[f64]) -> Vec<Polyline> {
    let g = &field.grid;
    let (n, m) = (g.n(), g.m());
    let z = |i: usize, j: usize| part.of(field.get(i, j));
    let mut out = Vec::new();
    if n < 2 || m < 2 {
        return out;
    }
    for (li, &level) in levels.iter().enumerate() {
        let point = |e: EdgeKey| {
            let (i, j, d) = e;
            let (i2, j2) = if d == 0 { (i + 1, j) } else { (i, j + 1) };
            let (a, b) = (z(i, j), z(i2, j2));
            let t = if b != a { (level - a) / (b - a) } else { 0.5 };
            let x = g.q.at(i) + t * (g.q.at(i2) - g.q.at(i));
            let y = g.p.at(j) + t * (g.p.at(j2) - g.p.at(j));
            (x, y)
        };
        let mut segs: Vec<(EdgeKey, EdgeKey)> = Vec::new();
        for i in 0..n - 1 {
            for j in 0..m - 1 {
                // corners counter-clockwise from (i, j); edge k joins corner k and k+1
                let c = [z(i, j), z(i + 1, j), z(i + 1, j + 1), z(i, j + 1)];
                let above = c.map(|v| v >= level);
                let edges: [EdgeKey; 4] = [(i, j, 0), (i + 1, j, 1), (i, j + 1, 0), (i, j, 1)];
                let cut: Vec<usize> = (0..4).filter(|&k| above[k] != above[(k + 1) % 4]).collect();
                match cut.len() {
                    2 => segs.push((edges[cut[0]], edges[cut[1]])),
                    4 => {
                        let center = c.iter().sum::<f64>() / 4.0 >= level;
                        if center == above[0] {
                            // corners 1 and 3 are isolated
                            segs.push((edges[0], edges[1]));
                            segs.push((edges[2], edges[3]));
                        } else {
                            segs.push((edges[3], edges[0]));
                            segs.push((edges[1], edges[2]));
                        }
                    }
                    _ => {}
                }
            }
        }
        let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
        for (k, &(a, b)) in segs.iter().enumerate() {
            adj.entry(a).or_default().push(k);
            adj.entry(b).or_default().push(k);
        }
        let mut used = vec![false; segs.len()];
        let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Option<Polyline> {
            let mut node = start;
            let mut pts = vec![point(node)];
            loop {
                let next = adj[&node].iter().copied().find(|&s| !used[s]);
                let Some(s) = next else { break };
                used[s] = true;
                let (a, b) = segs[s];
                node = if a == node { b } else { a };
                pts.push(point(node));
            }
            (pts.len() > 1).then(|| Polyline {
                level_index: li,
                level,
                closed: node == start,
                points: pts,
            })
        };
        // open lines start at boundary nodes of degree one
        let mut starts: Vec<EdgeKey> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
        starts.sort_unstable();
        for s in starts {
            if let Some(p) = walk(s, &mut used) {
                out.push(p);
            }
        }
        for k in 0..segs.len() {
            if !used[k] {
                if let Some(p) = walk(segs[k].0, &mut used) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// `level_index,level,polyline,closed,x,y` for [`CONTOUR_LEVELS`] levels
/// spanning the part's range.
pub fn write_contour_csv<W: Write>(field: &PhaseField, part: Part, w: W) -> Result<Vec<Polyline>> {
    let vals = field.values.iter().map(|&v| part.of(v));
    let (min, max) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let lines = contour_polylines(field, part, &contour_levels(min, max, CONTOUR_LEVELS));
    let mut out = BufWriter::new(w);
    writeln!(out, "level_index,level,polyline,closed,x,y")?;
    for (k, l) in lines.iter().enumerate() {
        for &(x, y) in &l.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                l.level_index,
                fmt17(l.level),
                k,
                l.closed as u8,
                fmt17(x),
                fmt17(y)
            )?;
        }
    }
    out.flush()?;
    Ok(lines)
}

pub fn save_contour_csv(field: &PhaseField, part: Part, path: impl AsRef<Path>) -> Result<Vec<Polyline>> {
    write_contour_csv(field, part, File::create(path)?)
}
