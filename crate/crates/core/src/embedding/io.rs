use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EmbeddingTable;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Serialize, Deserialize)]
struct Meta {
    trained_on: Option<String>,
    vectors: String,
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the word2vec text format (`count dims` header, then `id x1 .. xd`)
/// keyed by the graph's original node ids, plus a `.meta.json` sidecar with
/// the training-graph fingerprint.
pub fn save_embeddings(table: &EmbeddingTable, g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    table.covers(g)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "{} {}", g.node_count(), table.dims())?;
        for v in 0..g.node_count() {
            write!(w, "{}", g.original_id(v))?;
            for x in table.vector(v).expect("covered") {
                write!(w, " {x:?}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))?;

    let meta = Meta {
        trained_on: table.trained_on().map(str::to_owned),
        vectors: table.fingerprint(),
    };
    let mp = meta_path(path);
    fs::write(&mp, serde_json::to_vec_pretty(&meta)?).map_err(|e| Error::io(&mp, e))?;
    Ok(())
}

/// Reads word2vec text vectors keyed by original node id and reorders them to
/// the dense ids of `g`. Every node of `g` must have a vector; ids not in `g`
/// are ignored. The sidecar, when present, restores the training fingerprint.
pub fn load_embeddings(path: impl AsRef<Path>, g: &Graph) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| bad(1, "missing header".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let parsed: Option<(usize, usize)> = match head.as_slice() {
        [n, d] => n.parse().ok().zip(d.parse().ok()),
        _ => None,
    };
    let (count, dims) =
        parsed.ok_or_else(|| bad(1, format!("expected `count dims` header, got {header:?}")))?;
    if dims == 0 {
        return Err(bad(1, "dimension must be positive".into()));
    }

    let dense = g.dense_ids();
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; g.node_count()];
    let mut rows = 0usize;
    for (i, line) in lines {
        rows += 1;
        let mut fields = line.split_whitespace();
        let id_tok = fields.next().unwrap_or_default();
        let id: u64 = id_tok
            .parse()
            .map_err(|_| bad(i + 1, format!("invalid node id {id_tok:?}")))?;
        let vec = fields
            .map(|t| t.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad(i + 1, "non-numeric or non-finite component".into()))?;
        if vec.len() != dims {
            return Err(bad(
                i + 1,
                format!("expected {dims} components, got {}", vec.len()),
            ));
        }
        if let Some(&v) = dense.get(&id) {
            if slots[v].replace(vec).is_some() {
                return Err(bad(i + 1, format!("duplicate vector for node {id}")));
            }
        }
    }
    if rows != count {
        return Err(bad(
            1,
            format!("header declares {count} vectors, file has {rows}"),
        ));
    }
    let vectors = slots
        .into_iter()
        .enumerate()
        .map(|(v, s)| s.ok_or(Error::MissingEmbedding(v)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = EmbeddingTable::new(dims, vectors)?;

    let mp = meta_path(path);
    if mp.exists() {
        let meta: Meta = serde_json::from_slice(&fs::read(&mp).map_err(|e| Error::io(&mp, e))?)?;
        if let Some(fp) = meta.trained_on {
            table = table.with_trained_on(fp);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{train, WalkConfig};

    #[test]
    fn round_trip_preserves_vectors_and_fingerprint() {
        let g = crate::graph::supermarket(0.5).unwrap();
        let cfg = WalkConfig {
            walk_length: 10,
            dims: 8,
            walks_per_node: 2,
            ..WalkConfig::default()
        };
        let t = train(&g, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("emb.txt");
        save_embeddings(&t, &g, &p).unwrap();
        let back = load_embeddings(&p, &g).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.trained_on(), Some(g.fingerprint().as_str()));
    }

    #[test]
    fn malformed_files() {
        let g = Graph::from_arcs(2, [(0, 1, 1.0)], vec![1.0; 2]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        let cases = [
            "2\n0 1\n1 2\n",
            "2 2\n0 1.0 2.0\n1 3.0\n",
            "3 1\n0 1\n1 2\n",
            "2 1\n0 1\n0 2\n",
            "1 1\n0 1\n",
            "2 1\n0 nan\n1 2\n",
        ];
        for c in cases {
            fs::write(&p, c).unwrap();
            assert!(load_embeddings(&p, &g).is_err(), "{c:?}");
        }
        fs::write(&p, "3 1\n0 1\n1 2\n99 5\n").unwrap();
        let t = load_embeddings(&p, &g).unwrap();
        assert_eq!(t.vector(1).unwrap(), &[2.0]);
        assert_eq!(t.trained_on(), None);
    }
}
