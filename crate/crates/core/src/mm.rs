//! Matrix Market exchange format.
//!
//! Sparse matrices use the `coordinate` layout (`real`, `integer` or
//! `complex`; `general`, `symmetric` or `hermitian`). Dense blocks such as
//! right-hand sides and recycle bases use the `array` layout.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<Header> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_error(lineno, "header must start with %%MatrixMarket"));
    }
    if tokens.len() != 5 {
        return Err(parse_error(
            lineno,
            format!("header needs 5 fields, found {}", tokens.len()),
        ));
    }
    if tokens[1] != "matrix" {
        return Err(parse_error(lineno, format!("unsupported object '{}'", tokens[1])));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_error(lineno, format!("unsupported format '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => {
            return Err(parse_error(
                lineno,
                "pattern matrices carry no values and are not supported",
            ))
        }
        other => return Err(parse_error(lineno, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_error(lineno, format!("unsupported symmetry '{other}'"))),
    };
    Ok(Header {
        layout,
        field,
        symmetry,
    })
}

/// Lines with their 1-based numbers, skipping comments and blanks after the
/// header.
struct DataLines<R: BufRead> {
    lines: std::io::Lines<R>,
    lineno: usize,
}

impl<R: BufRead> DataLines<R> {
    fn next_data(&mut self) -> Result<Option<(usize, String)>> {
        for line in self.lines.by_ref() {
            self.lineno += 1;
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Ok(Some((self.lineno, t.to_string())));
        }
        Ok(None)
    }
}

fn open_with_header(path: &Path) -> Result<(Header, DataLines<BufReader<File>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| parse_error(1, "empty file"))??;
    let header = parse_header(&first, 1)?;
    Ok((header, DataLines { lines, lineno: 1 }))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, lineno: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_error(lineno, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_error(lineno, format!("cannot parse {what} from '{tok}'")))
}

fn parse_value<'a>(
    it: &mut impl Iterator<Item = &'a str>,
    field: Field,
    lineno: usize,
) -> Result<C64> {
    let re: f64 = parse_num(it.next(), lineno, "value")?;
    let im: f64 = match field {
        Field::Real => 0.0,
        Field::Complex => parse_num(it.next(), lineno, "imaginary part")?,
    };
    Ok(C64::new(re, im))
}

/// Reads a coordinate-format file. Symmetric and Hermitian storage is
/// expanded, indices become 0-based and duplicate entries are summed.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let (header, mut data) = open_with_header(path.as_ref())?;
    if header.layout != Layout::Coordinate {
        return Err(parse_error(1, "expected coordinate format for a sparse matrix"));
    }
    let (size_line, size) = data
        .next_data()?
        .ok_or_else(|| parse_error(data.lineno, "missing size line"))?;
    let mut it = size.split_whitespace();
    let m: usize = parse_num(it.next(), size_line, "row count")?;
    let n: usize = parse_num(it.next(), size_line, "column count")?;
    let nnz: usize = parse_num(it.next(), size_line, "entry count")?;
    if m == 0 || n == 0 {
        return Err(parse_error(size_line, "matrix dimensions must be positive"));
    }
    if header.symmetry != Symmetry::General && m != n {
        return Err(parse_error(size_line, "symmetric storage requires a square matrix"));
    }

    let mut triplets = Vec::with_capacity(nnz * 2);
    for _ in 0..nnz {
        let (lineno, line) = data
            .next_data()?
            .ok_or_else(|| parse_error(data.lineno, format!("expected {nnz} entries")))?;
        let mut it = line.split_whitespace();
        let i: usize = parse_num(it.next(), lineno, "row index")?;
        let j: usize = parse_num(it.next(), lineno, "column index")?;
        if i == 0 || j == 0 || i > m || j > n {
            return Err(parse_error(
                lineno,
                format!("index ({i}, {j}) outside a {m}×{n} matrix"),
            ));
        }
        let v = parse_value(&mut it, header.field, lineno)?;
        let (i, j) = (i - 1, j - 1);
        triplets.push((i, j, v));
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
            }
        }
    }
    if let Some((lineno, _)) = data.next_data()? {
        return Err(parse_error(lineno, format!("more than {nnz} entries")));
    }
    SparseMatrix::from_triplets(m, n, triplets)
}

fn needs_complex(values: impl IntoIterator<Item = C64>) -> bool {
    values.into_iter().any(|v| v.im != 0.0)
}

fn write_value(w: &mut impl Write, v: C64, complex: bool) -> std::io::Result<()> {
    if complex {
        write!(w, "{:e} {:e}", v.re, v.im)
    } else {
        write!(w, "{:e}", v.re)
    }
}

/// Writes general coordinate storage; `real` unless some value has a
/// nonzero imaginary part.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let complex = needs_complex(a.values().iter().copied());
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "%%MatrixMarket matrix coordinate {} general",
        if complex { "complex" } else { "real" }
    )?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        write!(w, "{} {} ", i + 1, j + 1)?;
        write_value(&mut w, v, complex)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dense `array` file (column-major, general storage).
pub fn read_dense_block(path: impl AsRef<Path>) -> Result<DenseBlock> {
    let (header, mut data) = open_with_header(path.as_ref())?;
    if header.layout != Layout::Array {
        return Err(parse_error(1, "expected array format for a dense block"));
    }
    if header.symmetry != Symmetry::General {
        return Err(parse_error(1, "only general array storage is supported"));
    }
    let (size_line, size) = data
        .next_data()?
        .ok_or_else(|| parse_error(data.lineno, "missing size line"))?;
    let mut it = size.split_whitespace();
    let m: usize = parse_num(it.next(), size_line, "row count")?;
    let n: usize = parse_num(it.next(), size_line, "column count")?;
    if m == 0 {
        return Err(parse_error(size_line, "row count must be positive"));
    }
    let mut entries = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        let (lineno, line) = data
            .next_data()?
            .ok_or_else(|| parse_error(data.lineno, format!("expected {} values", m * n)))?;
        let mut it = line.split_whitespace();
        entries.push(parse_value(&mut it, header.field, lineno)?);
    }
    if let Some((lineno, _)) = data.next_data()? {
        return Err(parse_error(lineno, format!("more than {} values", m * n)));
    }
    DenseBlock::from_col_major(m, n, entries)
}

pub fn write_dense_block(path: impl AsRef<Path>, block: &DenseBlock) -> Result<()> {
    let complex = needs_complex(block.entries().iter().copied());
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "%%MatrixMarket matrix array {} general",
        if complex { "complex" } else { "real" }
    )?;
    writeln!(w, "{} {}", block.n_rows(), block.n_cols())?;
    for &v in block.entries() {
        write_value(&mut w, v, complex)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
