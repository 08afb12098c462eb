//! Plain-text and binary formats.
//!
//! - Degree sequence: header `n m`, then `n` lines `d_in d_out`.
//! - Edge list: header `n m`, then `m` lines `tail head` (vertex ids).
//! - Matching dump: the tail -> head permutation as `m` little-endian
//!   `u64` words; reloading needs the degree sequence.
//! - CSV writers for distributions, mixing profiles, skeletons and tail
//!   verdicts; measures are one value per line.

use std::io::{BufRead, Read, Write};

use crate::degseq::BiDegreeSequence;
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::measure::EmpiricalMeasure;
use crate::tails::{Skeleton, TailVerdict};
use crate::walk::{DistVector, MixProfile};

fn parse_line<const K: usize>(line: &str, lineno: usize) -> Result<[usize; K]> {
    let mut out = [0usize; K];
    let mut fields = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok = fields
            .next()
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected {K} fields")))?;
        *slot = tok
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: `{tok}` is not a nonnegative integer")))?;
    }
    if fields.next().is_some() {
        return Err(Error::Parse(format!("line {lineno}: expected {K} fields")));
    }
    Ok(out)
}

/// Non-empty lines that do not start with `#`, numbered from 1.
fn content_lines(r: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|l| match l {
            Ok((_, s)) => !(s.trim().is_empty() || s.trim_start().starts_with('#')),
            Err(_) => true,
        })
}

fn read_header(lines: &mut impl Iterator<Item = Result<(usize, String)>>) -> Result<(usize, usize)> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing `n m` header".into()))??;
    let [n, m] = parse_line::<2>(&line, no)?;
    Ok((n, m))
}

pub fn read_sequence(r: impl BufRead) -> Result<BiDegreeSequence> {
    let mut lines = content_lines(r);
    let (n, m) = read_header(&mut lines)?;
    let mut in_deg = Vec::with_capacity(n);
    let mut out_deg = Vec::with_capacity(n);
    for l in lines {
        let (no, line) = l?;
        let [i, o] = parse_line::<2>(&line, no)?;
        in_deg.push(i);
        out_deg.push(o);
    }
    if in_deg.len() != n {
        return Err(Error::Parse(format!("header says {n} vertices, found {}", in_deg.len())));
    }
    let seq = BiDegreeSequence::from_degrees(in_deg, out_deg)?;
    if seq.m() != m {
        return Err(Error::Parse(format!("header says {m} edges, degrees sum to {}", seq.m())));
    }
    Ok(seq)
}

pub fn write_sequence(seq: &BiDegreeSequence, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {}", seq.n(), seq.m())?;
    for (i, o) in seq.pairs() {
        writeln!(w, "{i} {o}")?;
    }
    Ok(())
}

/// Reads an edge list; degrees are recomputed from the edges.
pub fn read_edges(r: impl BufRead) -> Result<Digraph> {
    let mut lines = content_lines(r);
    let (n, m) = read_header(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    let mut in_deg = vec![0usize; n];
    let mut out_deg = vec![0usize; n];
    for l in lines {
        let (no, line) = l?;
        let [u, v] = parse_line::<2>(&line, no)?;
        if u >= n || v >= n {
            return Err(Error::Parse(format!("line {no}: vertex out of range")));
        }
        out_deg[u] += 1;
        in_deg[v] += 1;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header says {m} edges, found {}", edges.len())));
    }
    Digraph::from_edges(BiDegreeSequence::from_degrees(in_deg, out_deg)?, &edges)
}

pub fn write_edges(g: &Digraph, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn write_matching(g: &Digraph, mut w: impl Write) -> Result<()> {
    for &f in g.matching() {
        w.write_all(&(f as u64).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matching(seq: BiDegreeSequence, mut r: impl Read) -> Result<Digraph> {
    let mut bytes = Vec::with_capacity(8 * seq.m());
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * seq.m() {
        return Err(Error::Parse(format!(
            "matching dump has {} bytes, expected {}",
            bytes.len(),
            8 * seq.m()
        )));
    }
    let matching = bytes
        .chunks_exact(8)
        .map(|c| {
            let x = u64::from_le_bytes(c.try_into().expect("8-byte chunk"));
            usize::try_from(x).map_err(|_| Error::Parse("index exceeds usize".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Digraph::from_matching(seq, matching)
}

pub fn write_distribution(d: &DistVector, mut w: impl Write) -> Result<()> {
    writeln!(w, "vertex,prob")?;
    for (v, p) in d.probs().iter().enumerate() {
        writeln!(w, "{v},{p:e}")?;
    }
    Ok(())
}

pub fn read_distribution(r: impl BufRead) -> Result<DistVector> {
    let mut probs = Vec::new();
    for (i, line) in r.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (v, p) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `vertex,prob`", i + 1)))?;
        let v: usize = v.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad vertex", i + 1)))?;
        if v != probs.len() {
            return Err(Error::Parse(format!("line {}: vertices must be listed in order", i + 1)));
        }
        probs.push(p.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad prob", i + 1)))?);
    }
    DistVector::new(probs)
}

pub fn write_profile(p: &MixProfile, mut w: impl Write) -> Result<()> {
    writeln!(w, "t,rho,d_tv,starts_used")?;
    for r in &p.rows {
        writeln!(w, "{},{},{:e},{}", r.t, r.rho, r.d_tv, r.starts_used)?;
    }
    Ok(())
}

pub fn write_measure(m: &EmpiricalMeasure, mut w: impl Write) -> Result<()> {
    for x in m.sorted() {
        writeln!(w, "{x:e}")?;
    }
    Ok(())
}

pub fn read_measure(r: impl BufRead) -> Result<EmpiricalMeasure> {
    let mut values = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(
            t.parse()
                .map_err(|_| Error::Parse(format!("line {}: `{t}` is not a number", i + 1)))?,
        );
    }
    EmpiricalMeasure::new(values)
}

pub fn write_skeleton(s: &Skeleton, mut w: impl Write) -> Result<()> {
    writeln!(w, "root,tail,head")?;
    for (z, e, f) in s.rows() {
        writeln!(w, "{z},{e},{f}")?;
    }
    Ok(())
}

pub fn write_verdict(v: &TailVerdict, mut w: impl Write) -> Result<()> {
    writeln!(w, "a,tail_phi,tail_psi,lo,hi,pass_phi,pass_psi")?;
    for r in &v.rows {
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{},{}",
            r.a, r.tail_phi, r.tail_psi, r.lo, r.hi, r.pass_phi, r.pass_psi
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_round_trip() {
        let seq = crate::degseq::gen_powerlaw_seq(100, 2.5, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_sequence(&seq, &mut buf).unwrap();
        assert_eq!(read_sequence(buf.as_slice()).unwrap(), seq);
    }

    #[test]
    fn sequence_errors() {
        assert!(read_sequence("2 4\n1 1\n2 2\n".as_bytes()).is_err());
        assert!(read_sequence("2 2\n1 1\n".as_bytes()).is_err());
        assert!(read_sequence("1 1\n1 x\n".as_bytes()).is_err());
        assert!(read_sequence("# comment\n1 1\n\n1 1\n".as_bytes()).is_ok());
    }

    #[test]
    fn matching_round_trip() {
        let seq = crate::degseq::gen_powerlaw_seq(100, 2.5, 2, 1).unwrap();
        let g = crate::graph::sample_dcm(&seq, 3);
        let mut buf = Vec::new();
        write_matching(&g, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 * g.m());
        assert_eq!(read_matching(seq.clone(), buf.as_slice()).unwrap(), g);
        assert!(read_matching(seq, &buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn edges_round_trip() {
        let seq = crate::degseq::gen_powerlaw_seq(50, 2.5, 2, 1).unwrap();
        let g = crate::graph::sample_dcm(&seq, 3);
        let mut buf = Vec::new();
        write_edges(&g, &mut buf).unwrap();
        let h = read_edges(buf.as_slice()).unwrap();
        assert_eq!(h.seq(), g.seq());
        assert_eq!(h.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn distribution_round_trip_is_exact() {
        let d = DistVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut buf = Vec::new();
        write_distribution(&d, &mut buf).unwrap();
        assert!(buf.starts_with(b"vertex,prob\n"));
        assert_eq!(read_distribution(buf.as_slice()).unwrap(), d);
    }

    #[test]
    fn measure_round_trip() {
        let m = EmpiricalMeasure::new(vec![3.0, 0.0, 1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        write_measure(&m, &mut buf).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), m);
    }
}
