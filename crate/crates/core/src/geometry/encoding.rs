use serde::{Deserialize, Serialize};

use super::{heading, normalize_angle, unit_vector, AttachmentPoint, Breakwater, Layout, Point2};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Each block is the absolute `(x, y)` endpoint of a segment.
    Cartesian,
    /// Each block is `(length, angle)`, the angle relative to the previous
    /// segment's heading (or the attachment's base angle for the first one).
    Angular,
}

impl Encoding {
    pub fn other(self) -> Self {
        match self {
            Encoding::Cartesian => Encoding::Angular,
            Encoding::Angular => Encoding::Cartesian,
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Encoding::Cartesian => "cartesian",
            Encoding::Angular => "angular",
        })
    }
}

/// Flat chromosome: one two-gene block per segment, grouped by attachment
/// point in scenario order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Genotype {
    pub encoding: Encoding,
    pub blocks: Vec<[f64; 2]>,
}

impl Genotype {
    pub fn new(encoding: Encoding, blocks: Vec<[f64; 2]>) -> Self {
        Self { encoding, blocks }
    }

    /// Angular genotype of zero-length segments: the unchanged base layout.
    pub fn empty(attachments: &[AttachmentPoint]) -> Self {
        let n = attachments.iter().map(|a| a.segments).sum();
        Self::new(Encoding::Angular, vec![[0.0, 0.0]; n])
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn gene_count(&self) -> usize {
        self.blocks.len() * 2
    }

    pub fn gene(&self, index: usize) -> f64 {
        self.blocks[index / 2][index % 2]
    }

    pub fn gene_mut(&mut self, index: usize) -> &mut f64 {
        &mut self.blocks[index / 2][index % 2]
    }
}

fn check_blocks(genotype: &Genotype, attachments: &[AttachmentPoint]) -> Result<()> {
    let expected: usize = attachments.iter().map(|a| a.segments).sum();
    if genotype.block_count() != expected {
        return Err(Error::Config(format!(
            "genotype has {} blocks but the attachments define {expected} segments",
            genotype.block_count()
        )));
    }
    Ok(())
}

/// Decodes a genotype into one polyline per attachment point.
pub fn decode(genotype: &Genotype, attachments: &[AttachmentPoint]) -> Result<Layout> {
    check_blocks(genotype, attachments)?;
    let mut blocks = genotype.blocks.iter();
    let breakwaters = attachments
        .iter()
        .map(|att| {
            let mut vertices = Vec::with_capacity(att.segments + 1);
            vertices.push(att.position);
            let mut prev = att.position;
            let mut cumulative = att.base_angle;
            for &[a, b] in blocks.by_ref().take(att.segments) {
                let next = match genotype.encoding {
                    Encoding::Cartesian => Point2::new(a, b),
                    Encoding::Angular => {
                        cumulative += b;
                        if a == 0.0 {
                            prev
                        } else {
                            let (dx, dy) = unit_vector(cumulative);
                            Point2::new(prev.x + a * dx, prev.y + a * dy)
                        }
                    }
                };
                vertices.push(next);
                prev = next;
            }
            Breakwater {
                vertices,
                material: att.material,
            }
        })
        .collect();
    Ok(Layout { breakwaters })
}

/// Re-encodes a genotype without changing its decoded layout.
///
/// A zero-length Cartesian segment has no heading; it becomes a relative
/// angle of 0 so the following segment keeps measuring from the last real
/// heading.
pub fn convert(
    genotype: &Genotype,
    target: Encoding,
    attachments: &[AttachmentPoint],
) -> Result<Genotype> {
    check_blocks(genotype, attachments)?;
    if genotype.encoding == target {
        return Ok(genotype.clone());
    }
    let layout = decode(genotype, attachments)?;
    let blocks = match target {
        Encoding::Cartesian => layout
            .breakwaters
            .iter()
            .flat_map(|bw| bw.vertices[1..].iter().map(|p| [p.x, p.y]))
            .collect(),
        Encoding::Angular => layout
            .breakwaters
            .iter()
            .zip(attachments)
            .flat_map(|(bw, att)| {
                let mut current = att.base_angle;
                bw.segments()
                    .map(|(p, q)| {
                        let length = p.distance(q);
                        if length == 0.0 {
                            return [0.0, 0.0];
                        }
                        let absolute = heading(q.x - p.x, q.y - p.y);
                        let relative = normalize_angle(absolute - current);
                        current += relative;
                        [length, relative]
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
    };
    Ok(Genotype::new(target, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Material;

    fn attachment(x: f64, y: f64, base: f64, segments: usize) -> AttachmentPoint {
        AttachmentPoint {
            position: Point2::new(x, y),
            base_angle: base,
            segments,
            material: Material::SolidWall,
        }
    }

    /// Independent route: rotate the accumulated heading vector by each
    /// relative angle with a 2x2 rotation matrix.
    fn rotation_oracle(origin: Point2, base: f64, blocks: &[[f64; 2]]) -> Vec<Point2> {
        let rad = base.to_radians();
        let (mut hx, mut hy) = (rad.cos(), rad.sin());
        let mut p = origin;
        let mut out = vec![p];
        for &[len, ang] in blocks {
            let (s, c) = ang.to_radians().sin_cos();
            let (nx, ny) = (c * hx - s * hy, s * hx + c * hy);
            hx = nx;
            hy = ny;
            p = Point2::new(p.x + len * hx, p.y + len * hy);
            out.push(p);
        }
        out
    }

    #[test]
    fn axis_aligned_single_segment() {
        let atts = [attachment(0.0, 0.0, 0.0, 1)];
        let g = Genotype::new(Encoding::Angular, vec![[5.0, 0.0]]);
        let layout = decode(&g, &atts).unwrap();
        assert_eq!(
            layout.breakwaters[0].vertices,
            vec![Point2::new(0.0, 0.0), Point2::new(5.0, 0.0)]
        );
    }

    #[test]
    fn zero_length_collapses_to_previous_vertex() {
        let atts = [attachment(2.0, 3.0, 10.0, 2)];
        let g = Genotype::new(Encoding::Angular, vec![[4.0, 20.0], [0.0, 37.0]]);
        let v = &decode(&g, &atts).unwrap().breakwaters[0].vertices;
        assert_eq!(v[2], v[1]);
    }

    #[test]
    fn chained_relative_angles_match_rotation_oracle() {
        let atts = [attachment(0.0, 0.0, 90.0, 2)];
        let blocks = vec![[3.0, 0.0], [4.0, -90.0]];
        let g = Genotype::new(Encoding::Angular, blocks.clone());
        let v = &decode(&g, &atts).unwrap().breakwaters[0].vertices;
        let expected = [
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 3.0),
            Point2::new(4.0, 3.0),
        ];
        let oracle = rotation_oracle(atts[0].position, 90.0, &blocks);
        for ((got, want), alt) in v.iter().zip(&expected).zip(&oracle) {
            assert!(got.distance(*want) < 1e-12, "{got:?} vs {want:?}");
            assert!(got.distance(*alt) < 1e-12, "{got:?} vs oracle {alt:?}");
        }
    }

    #[test]
    fn cartesian_to_angular_examples() {
        let atts = [attachment(0.0, 0.0, 0.0, 1)];
        let g = Genotype::new(Encoding::Cartesian, vec![[5.0, 0.0]]);
        let a = convert(&g, Encoding::Angular, &atts).unwrap();
        assert_eq!(a.blocks, vec![[5.0, 0.0]]);

        let atts = [attachment(0.0, 0.0, 90.0, 2)];
        let g = Genotype::new(Encoding::Cartesian, vec![[0.0, 3.0], [4.0, 3.0]]);
        let a = convert(&g, Encoding::Angular, &atts).unwrap();
        assert!((a.blocks[0][0] - 3.0).abs() < 1e-12 && a.blocks[0][1].abs() < 1e-12);
        assert!((a.blocks[1][0] - 4.0).abs() < 1e-12 && (a.blocks[1][1] + 90.0).abs() < 1e-12);
    }

    #[test]
    fn zero_length_cartesian_segment_gets_zero_angle() {
        let atts = [attachment(1.0, 1.0, 45.0, 3)];
        let g = Genotype::new(
            Encoding::Cartesian,
            vec![[1.0, 1.0], [1.0, 4.0], [1.0, 4.0]],
        );
        let a = convert(&g, Encoding::Angular, &atts).unwrap();
        assert_eq!(a.blocks[0], [0.0, 0.0]);
        assert_eq!(a.blocks[2], [0.0, 0.0]);
        // the second segment is measured from the base angle, since the first has no heading
        assert!((a.blocks[1][1] - 45.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_block_count_is_a_configuration_error() {
        let atts = [attachment(0.0, 0.0, 0.0, 2)];
        let g = Genotype::new(Encoding::Angular, vec![[1.0, 0.0]]);
        assert!(matches!(decode(&g, &atts), Err(Error::Config(_))));
        assert!(matches!(
            convert(&g, Encoding::Cartesian, &atts),
            Err(Error::Config(_))
        ));
    }
}
