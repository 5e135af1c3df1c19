//! Point clouds on disk: CSV (one point per line, optional header) and
//! ASCII PLY (vertex elements only) in; CSV out.

use std::path::Path;

use geostab::geometry::{Point, PointCloud};

use crate::error::{CliError, CliResult};

pub fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let is_ply = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ply")) || text.starts_with("ply");
    let parsed = if is_ply { parse_ply(&text) } else { parse_csv(&text) };
    parsed.map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_number(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_csv(text: &str) -> CliResult<PointCloud> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse(format!("line {}: {e}", line + 1)))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let values: Option<Vec<f64>> = record.iter().map(parse_number).collect();
        match values {
            Some(v) => points.push(Point::new(v)),
            // a non-numeric first row is a header
            None if line == 0 => continue,
            None => return Err(CliError::Parse(format!("line {}: expected numbers, found {record:?}", line + 1))),
        }
    }
    if points.is_empty() {
        return Err(CliError::Parse("no points found".into()));
    }
    Ok(PointCloud::new(points)?)
}

pub fn parse_ply(text: &str) -> CliResult<PointCloud> {
    let mut lines = text.lines().map(str::trim);
    if lines.next() != Some("ply") {
        return Err(CliError::Parse("missing ply magic line".into()));
    }
    let mut vertices = None;
    let mut in_vertex = false;
    let mut props: Vec<String> = Vec::new();
    let mut ended = false;
    for line in lines.by_ref() {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["format", "ascii", _] => {}
            ["format", other, ..] => return Err(CliError::Parse(format!("unsupported ply format {other}"))),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", "vertex", count] => {
                vertices = Some(count.parse::<usize>().map_err(|_| CliError::Parse(format!("bad vertex count {count}")))?);
                in_vertex = true;
            }
            ["element", ..] => in_vertex = false,
            ["property", "list", ..] if in_vertex => {
                return Err(CliError::Parse("list properties on vertices are not supported".into()))
            }
            ["property", _, name] if in_vertex => props.push((*name).to_string()),
            ["property", ..] => {}
            ["end_header"] => {
                ended = true;
                break;
            }
            _ => return Err(CliError::Parse(format!("unexpected ply header line {line:?}"))),
        }
    }
    if !ended {
        return Err(CliError::Parse("ply header has no end_header".into()));
    }
    let count = vertices.ok_or_else(|| CliError::Parse("ply file has no vertex element".into()))?;
    let column = |name: &str| props.iter().position(|p| p == name);
    let mut axes = vec![
        column("x").ok_or_else(|| CliError::Parse("vertex has no x property".into()))?,
        column("y").ok_or_else(|| CliError::Parse("vertex has no y property".into()))?,
    ];
    axes.extend(column("z"));
    let mut points = Vec::with_capacity(count);
    for (i, line) in lines.filter(|l| !l.is_empty()).take(count).enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < props.len() {
            return Err(CliError::Parse(format!("vertex {i} has {} of {} fields", fields.len(), props.len())));
        }
        let coords: Option<Vec<f64>> = axes.iter().map(|&a| parse_number(fields[a])).collect();
        points.push(Point::new(coords.ok_or_else(|| CliError::Parse(format!("vertex {i} is not numeric")))?));
    }
    if points.len() != count {
        return Err(CliError::Parse(format!("expected {count} vertices, found {}", points.len())));
    }
    Ok(PointCloud::new(points)?)
}

pub fn format_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let fields: Vec<String> = p.coords().iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> CliResult<()> {
    crate::json::write_atomic(path, &format_csv(cloud))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_and_without_header() {
        let a = parse_csv("x,y,z\n1,2,3\n4, 5 ,6\n").unwrap();
        let b = parse_csv("1,2,3\n\n4,5,6").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points()[1], Point::from([4.0, 5.0, 6.0]));
    }

    #[test]
    fn csv_errors() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("x,y\n").is_err());
        assert!(parse_csv("1,2\n3,oops\n").is_err());
        assert!(parse_csv("1,2\n3,4,5\n").is_err());
        assert!(parse_csv("1,nan\n").is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let cloud = PointCloud::new(vec![Point::from([0.1, -1.0 / 3.0]), Point::from([1e-300, 123456.789])]).unwrap();
        assert_eq!(parse_csv(&format_csv(&cloud)).unwrap(), cloud);
    }

    #[test]
    fn ply_vertices() {
        let text = "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\nproperty float x\nproperty float y\n\
                    property float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\n\
                    end_header\n1 2 3 255\n-4 5.5 6 0\n3 0 1 1\n";
        let cloud = parse_ply(text).unwrap();
        assert_eq!(cloud.points(), &[Point::from([1.0, 2.0, 3.0]), Point::from([-4.0, 5.5, 6.0])]);
        let planar = parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nproperty double y\nend_header\n7 8\n").unwrap();
        assert_eq!(planar.dim(), 2);
    }

    #[test]
    fn ply_errors() {
        assert!(parse_ply("ply\nformat binary_little_endian 1.0\nend_header\n").is_err());
        assert!(parse_ply("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nend_header\n1 2\n").is_err());
        assert!(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n1\n").is_err());
    }
}
