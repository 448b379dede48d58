//! Binary container for Schur decompositions and sampled codes.
//!
//! Layout (all integers little-endian):
//!
//! | bytes | field |
//! |-------|-------|
//! | 8     | magic `COVQEC\0\0` |
//! | 4     | format version (`1`) |
//! | 4     | payload kind: 1 Schur decomposition, 2 U(1) code, 3 SU(d) code |
//! | 8     | payload length `L` |
//! | L     | payload |
//! | 32    | SHA-256 of the payload |
//!
//! Matrices are stored as `rows: u64, cols: u64` followed by the entries in
//! column-major order, each as the raw IEEE-754 bits of the real then the
//! imaginary part, so a round trip is bit-exact.

use crate::codes::{CommutantKind, CommutantUnitary, SudCode, SudCodeSpec, U1Code, U1CodeSpec};
use crate::error::{Error, Result};
use crate::symmetry::{HammingSectors, Partition, SchurBlock, SchurDecomposition};
use crate::tensor::CMat;
use crate::C64;
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

pub const MAGIC: [u8; 8] = *b"COVQEC\0\0";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
pub enum PayloadKind {
    Schur = 1,
    U1Code = 2,
    SudCode = 3,
}

impl PayloadKind {
    fn from_u32(v: u32) -> Result<Self> {
        match v {
            1 => Ok(Self::Schur),
            2 => Ok(Self::U1Code),
            3 => Ok(Self::SudCode),
            other => Err(Error::Container(format!("unknown payload kind {other}"))),
        }
    }
}

#[derive(Default)]
struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    fn complex(&mut self, z: C64) {
        self.f64(z.re);
        self.f64(z.im);
    }

    fn matrix(&mut self, m: &CMat) {
        self.usize(m.nrows());
        self.usize(m.ncols());
        for z in m.iter() {
            self.complex(*z);
        }
    }

    fn partition(&mut self, p: &Partition) {
        self.usize(p.parts().len());
        for &x in p.parts() {
            self.usize(x);
        }
    }

    fn schur(&mut self, s: &SchurDecomposition) {
        self.usize(s.n);
        self.usize(s.d);
        self.usize(s.blocks.len());
        for b in &s.blocks {
            self.partition(&b.lambda);
            self.usize(b.l);
            self.usize(b.r);
            self.matrix(&b.isometry);
        }
    }

    fn blocks(&mut self, blocks: &[CMat]) {
        self.usize(blocks.len());
        for b in blocks {
            self.matrix(b);
        }
    }
}

struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Container("payload is truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Container("length does not fit in usize".into()))
    }

    /// A count that must be backed by at least `min_bytes` bytes each.
    fn count(&mut self, min_bytes: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(min_bytes) > self.buf.len() - self.pos {
            return Err(Error::Container(format!("declared count {n} exceeds the payload")));
        }
        Ok(n)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn complex(&mut self) -> Result<C64> {
        Ok(C64::new(self.f64()?, self.f64()?))
    }

    fn matrix(&mut self) -> Result<CMat> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let len = rows.checked_mul(cols).ok_or_else(|| Error::Container("matrix size overflows".into()))?;
        if len.saturating_mul(16) > self.buf.len() - self.pos {
            return Err(Error::Container(format!("{rows}x{cols} matrix exceeds the payload")));
        }
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(self.complex()?);
        }
        Ok(CMat::from_vec(rows, cols, data))
    }

    fn partition(&mut self) -> Result<Partition> {
        let len = self.count(8)?;
        let parts = (0..len).map(|_| self.usize()).collect::<Result<Vec<_>>>()?;
        Partition::new(parts).map_err(|e| Error::Container(format!("bad partition: {e}")))
    }

    fn schur(&mut self) -> Result<SchurDecomposition> {
        let n = self.usize()?;
        let d = self.usize()?;
        let count = self.count(40)?;
        let mut blocks = Vec::with_capacity(count);
        for _ in 0..count {
            let lambda = self.partition()?;
            let l = self.usize()?;
            let r = self.usize()?;
            let isometry = self.matrix()?;
            if isometry.ncols() != l * r {
                return Err(Error::Container("isometry width does not match l·r".into()));
            }
            blocks.push(SchurBlock { lambda, l, r, isometry });
        }
        Ok(SchurDecomposition { n, d, blocks })
    }

    fn blocks(&mut self) -> Result<Vec<CMat>> {
        let count = self.count(16)?;
        (0..count).map(|_| self.matrix()).collect()
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Container(format!("{} trailing bytes in payload", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn frame(kind: PayloadKind, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 56);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(kind as u32).to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&Sha256::digest(payload));
    out
}

fn unframe(bytes: &[u8]) -> Result<(PayloadKind, &[u8])> {
    if bytes.len() < 24 + 32 || bytes[..8] != MAGIC {
        return Err(Error::Container("not a covqec container".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("four bytes"));
    if version != VERSION {
        return Err(Error::Container(format!("unsupported container version {version}")));
    }
    let kind = PayloadKind::from_u32(u32::from_le_bytes(bytes[12..16].try_into().expect("four bytes")))?;
    let len = u64::from_le_bytes(bytes[16..24].try_into().expect("eight bytes"));
    if len != (bytes.len() - 24 - 32) as u64 {
        return Err(Error::Container("payload length does not match the file size".into()));
    }
    let payload = &bytes[24..bytes.len() - 32];
    if Sha256::digest(payload).as_slice() != &bytes[bytes.len() - 32..] {
        return Err(Error::Container("payload checksum mismatch".into()));
    }
    Ok((kind, payload))
}

fn expect_kind(bytes: &[u8], want: PayloadKind) -> Result<Decoder<'_>> {
    let (kind, payload) = unframe(bytes)?;
    if kind != want {
        return Err(Error::Container(format!("container holds {kind:?}, expected {want:?}")));
    }
    Ok(Decoder { buf: payload, pos: 0 })
}

/// Kind of payload stored in a container, after validating the frame.
pub fn peek_kind(bytes: &[u8]) -> Result<PayloadKind> {
    Ok(unframe(bytes)?.0)
}

pub fn encode_schur(s: &SchurDecomposition) -> Vec<u8> {
    let mut e = Encoder::default();
    e.schur(s);
    frame(PayloadKind::Schur, &e.buf)
}

pub fn decode_schur(bytes: &[u8]) -> Result<SchurDecomposition> {
    let mut d = expect_kind(bytes, PayloadKind::Schur)?;
    let s = d.schur()?;
    d.finish()?;
    Ok(s)
}

pub fn encode_u1_code(code: &U1Code) -> Vec<u8> {
    let spec = code.spec();
    let mut e = Encoder::default();
    for v in [spec.n, spec.k, spec.alpha] {
        e.usize(v);
    }
    e.u64(spec.seed);
    e.blocks(code.unitary().blocks());
    frame(PayloadKind::U1Code, &e.buf)
}

pub fn decode_u1_code(bytes: &[u8]) -> Result<U1Code> {
    let mut d = expect_kind(bytes, PayloadKind::U1Code)?;
    let (n, k, alpha) = (d.usize()?, d.usize()?, d.usize()?);
    let seed = d.u64()?;
    let blocks = d.blocks()?;
    d.finish()?;
    let spec = U1CodeSpec::new(n, k, alpha, seed)?;
    let unitary = CommutantUnitary::from_blocks(CommutantKind::U1(Arc::new(HammingSectors::new(n)?)), blocks)?;
    U1Code::with_unitary(spec, unitary)
}

/// Stores the spec, the commutant blocks and both Schur bases (for `n` and
/// `n - 1` qudits), so decoding needs no recomputation.
pub fn encode_sud_code(code: &SudCode, full: &SchurDecomposition, anc: &SchurDecomposition) -> Result<Vec<u8>> {
    let spec = code.spec();
    if full.n != spec.n || anc.n + 1 != spec.n || full.d != spec.d || anc.d != spec.d {
        return Err(Error::Shape("Schur bases do not match the code".into()));
    }
    let mut e = Encoder::default();
    e.usize(spec.n);
    e.usize(spec.d);
    e.partition(&spec.lambda);
    e.u64(spec.seed);
    match &spec.psi_lambda {
        None => e.u64(0),
        Some(p) => {
            e.u64(1);
            e.usize(p.len());
            for z in p {
                e.complex(*z);
            }
        }
    }
    e.blocks(code.unitary().blocks());
    e.schur(full);
    e.schur(anc);
    Ok(frame(PayloadKind::SudCode, &e.buf))
}

pub fn decode_sud_code(bytes: &[u8]) -> Result<(SudCode, Arc<SchurDecomposition>, SchurDecomposition)> {
    let mut d = expect_kind(bytes, PayloadKind::SudCode)?;
    let (n, dd) = (d.usize()?, d.usize()?);
    let lambda = d.partition()?;
    let seed = d.u64()?;
    let psi = match d.u64()? {
        0 => None,
        1 => {
            let len = d.count(16)?;
            Some((0..len).map(|_| d.complex()).collect::<Result<Vec<_>>>()?)
        }
        other => return Err(Error::Container(format!("bad ψ_λ flag {other}"))),
    };
    let blocks = d.blocks()?;
    let full = Arc::new(d.schur()?);
    let anc = d.schur()?;
    d.finish()?;
    let mut spec = SudCodeSpec::new(n, dd, lambda, seed)?;
    if let Some(p) = psi {
        spec = spec.with_psi_lambda(p)?;
    }
    let unitary = CommutantUnitary::from_blocks(CommutantKind::SuD(full.clone()), blocks)?;
    let code = SudCode::with_unitary(spec, unitary, &anc)?;
    Ok((code, full, anc))
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    Ok(buf)
}
