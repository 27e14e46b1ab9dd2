//! Line-oriented graph text format.
//!
//! ```text
//! vertices <N> metric <KIND> [dim <D>] [layers <M>]
//! v <id> <c_1> ... <c_D>      one per vertex when dim is given
//! t <id>                      vertex whose neighborhood was truncated
//! e <u> <v>                   one per undirected edge, u < v
//! ```
//!
//! Lines starting with `#` are comments. For `StackedComposite` graphs the
//! base graph is the subgraph induced on the first `N / M` vertices.

use std::io::{BufRead, Write};
use std::sync::Arc;

use super::{Graph, MetricKind, Stacking};
use crate::error::{Error, Result};

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    write!(out, "vertices {} metric {}", g.vertex_count(), g.metric_kind())?;
    if g.has_coords() {
        write!(out, " dim {}", g.dim())?;
    }
    if let Some(st) = g.stacking() {
        write!(out, " layers {}", st.layers)?;
    }
    writeln!(out)?;
    if g.has_coords() {
        for v in 0..g.vertex_count() {
            write!(out, "v {v}")?;
            for c in g.coords(v).unwrap() {
                write!(out, " {c}")?;
            }
            writeln!(out)?;
        }
    }
    for v in (0..g.vertex_count()).filter(|&v| g.is_truncated(v)) {
        writeln!(out, "t {v}")?;
    }
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}")?;
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
        line,
        msg: format!("expected {what}"),
    })
}

pub fn read_graph<R: BufRead>(input: R) -> Result<Graph> {
    let mut header: Option<(usize, MetricKind, usize, usize)> = None;
    let mut coords: Vec<f64> = Vec::new();
    let mut seen_coord: Vec<bool> = Vec::new();
    let mut truncated: Vec<bool> = Vec::new();
    let mut edges = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let tag = toks.next().unwrap();
        match (tag, &header) {
            ("vertices", None) => {
                let n: usize = parse_num(toks.next(), lineno, "vertex count")?;
                if toks.next() != Some("metric") {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected `metric`".into(),
                    });
                }
                let metric: MetricKind = toks
                    .next()
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        msg: "missing metric kind".into(),
                    })?
                    .parse()?;
                let (mut dim, mut layers) = (0, 0);
                while let Some(key) = toks.next() {
                    match key {
                        "dim" => dim = parse_num(toks.next(), lineno, "dimension")?,
                        "layers" => layers = parse_num(toks.next(), lineno, "layer count")?,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: format!("unknown header key `{other}`"),
                            })
                        }
                    }
                }
                coords = vec![0.0; n * dim];
                seen_coord = vec![false; if dim > 0 { n } else { 0 }];
                truncated = vec![false; n];
                header = Some((n, metric, dim, layers));
            }
            ("vertices", Some(_)) => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "duplicate header".into(),
                })
            }
            (_, None) => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "missing `vertices` header".into(),
                })
            }
            ("v", Some((n, _, dim, _))) => {
                let id: usize = parse_num(toks.next(), lineno, "vertex id")?;
                if id >= *n || *dim == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("unexpected coordinates for vertex {id}"),
                    });
                }
                for k in 0..*dim {
                    coords[id * dim + k] = parse_num(toks.next(), lineno, "coordinate")?;
                }
                seen_coord[id] = true;
            }
            ("t", Some((n, ..))) => {
                let id: usize = parse_num(toks.next(), lineno, "vertex id")?;
                if id >= *n {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("vertex {id} out of range"),
                    });
                }
                truncated[id] = true;
            }
            ("e", Some(_)) => {
                let u: usize = parse_num(toks.next(), lineno, "edge endpoint")?;
                let v: usize = parse_num(toks.next(), lineno, "edge endpoint")?;
                edges.push((u, v));
            }
            (other, Some(_)) => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unknown record `{other}`"),
                })
            }
        }
    }
    let (n, metric, dim, layers) = header.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    if seen_coord.iter().any(|&s| !s) {
        return Err(Error::Parse {
            line: 0,
            msg: "some vertices lack coordinates".into(),
        });
    }
    let plain_metric = if metric == MetricKind::StackedComposite {
        MetricKind::GraphDistance
    } else {
        metric
    };
    let mut g = Graph::from_edges(n, &edges, plain_metric)?;
    if dim > 0 {
        g = g.with_coords(dim, coords)?;
    }
    g = g.with_truncated(truncated)?;
    if metric == MetricKind::StackedComposite {
        if layers < 2 || n % layers != 0 {
            return Err(Error::MalformedGraph(format!("{n} vertices do not split into {layers} layers")));
        }
        let nb = n / layers;
        let keep: Vec<usize> = (0..nb).collect();
        let base = g.induced(&keep)?;
        let base_truncated = (0..nb).map(|v| g.is_truncated(v)).collect();
        let base = base.with_truncated(base_truncated)?;
        g = g.with_stacking(Stacking {
            base: Arc::new(base),
            layers,
        });
    } else {
        g = g.with_metric(metric)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{build_band_graph, build_sierpinski, build_stacked, BandGraphSpec, Norm, SierpinskiSpec, StackSpec};

    fn roundtrip(g: &Graph) -> Graph {
        let mut buf = Vec::new();
        write_graph(g, &mut buf).unwrap();
        read_graph(&buf[..]).unwrap()
    }

    fn same(a: &Graph, b: &Graph) {
        assert_eq!(a.vertex_count(), b.vertex_count());
        assert_eq!(a.metric_kind(), b.metric_kind());
        assert!(a.edges().eq(b.edges()));
        for v in 0..a.vertex_count() {
            assert_eq!(a.coords(v), b.coords(v));
            assert_eq!(a.is_truncated(v), b.is_truncated(v));
        }
    }

    #[test]
    fn band_and_gasket_roundtrip() {
        let band = build_band_graph(&BandGraphSpec::new(2, 2, 4, Norm::L1)).unwrap();
        same(&band, &roundtrip(&band));
        let gasket = build_sierpinski(&SierpinskiSpec { level: 3 }).unwrap();
        same(&gasket, &roundtrip(&gasket));
    }

    #[test]
    fn stacked_roundtrip_keeps_layers() {
        let base = Arc::new(build_band_graph(&BandGraphSpec::new(1, 1, 3, Norm::L1)).unwrap());
        let g = build_stacked(&StackSpec { base, layers: 3 }).unwrap();
        let back = roundtrip(&g);
        same(&g, &back);
        assert_eq!(back.stacking().unwrap().layers, 3);
        assert_eq!(back.distance(0, 7).unwrap(), 0.5);
    }

    #[test]
    fn header_format() {
        let g = Graph::from_edges(2, &[(0, 1)], MetricKind::GraphDistance).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "vertices 2 metric GraphDistance\ne 0 1\n");
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_graph("e 0 1\n".as_bytes()).is_err());
        assert!(read_graph("vertices 2 metric Nope\n".as_bytes()).is_err());
        assert!(read_graph("vertices 2 metric GraphDistance\ne 0 x\n".as_bytes()).is_err());
        assert!(matches!(
            read_graph("vertices 3 metric GraphDistance\ne 0 1\n".as_bytes()),
            Err(Error::Disconnected { .. })
        ));
    }
}
