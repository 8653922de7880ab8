//! Frame assembly: payload bits are split between the matcher, whose output
//! picks fundamental points, and uncoded region symbols; the remaining
//! region symbols stand in for FEC parity and are drawn uniformly from a
//! seeded generator.
//!
//! Lengths are fixed from the composition: `N` points per frame,
//! `n_u = floor(N (R_C (1 + R_AM) - R_AM))` uncoded region symbols, and
//! `M_dm = floor(k / log2 q)` matcher symbols for a `k`-bit matcher input,
//! the `k - M_dm log2 q` leftover input bits being zero padding.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::plan::{finish, min_code_rate, FrameLengths, Layering, PasPlan};
use super::{
    ccdm_decode, ccdm_encode, input_bits, pas_demap_hard, Composition, PasError, RegionMap, Result,
};
use crate::constellation::Constellation;

pub const FRAME_MAGIC: &[u8; 4] = b"PASF";
const HEADER_LEN: usize = 4 + 4 * 4 + 8;

/// Alphabet sizes supported for framing.
pub const FRAME_Q: [usize; 3] = [2, 4, 8];

/// A plan instantiated on a constellation and block length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePlan {
    pub plan: PasPlan,
    pub composition: Composition,
    /// Matcher input length `k` in bits, padding included.
    pub dm_bits: usize,
    /// Information symbols routed through the matcher.
    pub dm_symbols: usize,
    /// Region symbols carrying uncoded information.
    pub uncoded_regions: usize,
    /// Region symbols standing in for parity.
    pub parity_regions: usize,
    pub payload_bits: usize,
}

impl FramePlan {
    pub fn points(&self) -> usize {
        self.composition.len()
    }

    pub fn to_json(&self) -> String {
        crate::fmt::to_json_string(self).expect("frame plan serializes")
    }
}

fn bits_per_symbol(q: usize) -> usize {
    q.trailing_zeros() as usize
}

fn check_q(q: usize) -> Result<()> {
    if !FRAME_Q.contains(&q) {
        return Err(PasError::InvalidParameter(format!(
            "framing supports q in {FRAME_Q:?}, got {q}"
        )));
    }
    Ok(())
}

/// Instantiates a frame of `n` points on `c` for a target code rate: the
/// composition approximates the amplitude marginal of `c`, and the realized
/// code rate is the largest compatible one not above `code_rate`.
pub fn plan_frame(c: &Constellation, n: usize, code_rate: f64) -> Result<FramePlan> {
    let q = c.q();
    check_q(q)?;
    let map = RegionMap::new(c)?;
    let composition = super::quantize_composition(&map.amplitude_distribution(c), n)?;
    plan_frame_with(&map, composition, code_rate)
}

/// As [`plan_frame`] with an explicit composition over the fundamental set.
pub fn plan_frame_with(
    map: &RegionMap,
    composition: Composition,
    code_rate: f64,
) -> Result<FramePlan> {
    let q = map.q();
    check_q(q)?;
    if composition.classes() != map.base_len() {
        return Err(PasError::InvalidParameter(format!(
            "composition has {} classes for {} fundamental points",
            composition.classes(),
            map.base_len()
        )));
    }
    let r_am = (map.base_len() as f64).ln() / (q as f64).ln();
    if r_am < 1.0 - 1e-12 {
        return Err(PasError::InvalidParameter(
            "fundamental set smaller than q".into(),
        ));
    }
    let floor = min_code_rate(r_am);
    if !(code_rate >= floor - 1e-12 && code_rate < 1.0) {
        return Err(PasError::IncompatibleRates(format!(
            "code rate {code_rate} outside [R_AM/(1+R_AM) = {floor}, 1)"
        )));
    }
    let n = composition.len();
    let bps = bits_per_symbol(q);
    let dm_bits = input_bits(&composition);
    let dm_symbols = dm_bits / bps;
    if dm_symbols == 0 {
        return Err(PasError::InvalidParameter(
            "composition carries less than one q-ary symbol".into(),
        ));
    }
    let uncoded = ((n as f64) * (code_rate * (1.0 + r_am) - r_am) + 1e-9)
        .floor()
        .max(0.0) as usize;
    let uncoded = uncoded.min(n);
    let info = dm_symbols + uncoded;
    let nf = n as f64;
    let r_dm = dm_symbols as f64 / (nf * r_am);
    let r_c = (nf * r_am + uncoded as f64) / (nf * (1.0 + r_am));
    let split = uncoded as f64 / info as f64;
    let mut plan = finish(Layering::Circular { q }, r_am, r_dm, r_c, split);
    plan.lengths = Some(FrameLengths {
        info_symbols: info,
        output_symbols: n,
        padding_bits: dm_bits - dm_symbols * bps,
    });
    Ok(FramePlan {
        plan,
        composition,
        dm_bits,
        dm_symbols,
        uncoded_regions: uncoded,
        parity_regions: n - uncoded,
        payload_bits: info * bps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub seed: u64,
    pub amplitudes: Vec<u16>,
    pub regions: Vec<u16>,
    pub points: Vec<Complex64>,
}

fn symbols_from_bits(bits: &[bool], bps: usize) -> Vec<u16> {
    bits.chunks(bps)
        .map(|ch| ch.iter().fold(0u16, |acc, &b| (acc << 1) | u16::from(b)))
        .collect()
}

fn bits_from_symbols(symbols: &[u16], bps: usize) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|&s| (0..bps).rev().map(move |k| (s >> k) & 1 == 1))
        .collect()
}

/// Builds one frame from exactly `fp.payload_bits` payload bits.
pub fn pas_frame(payload: &[bool], fp: &FramePlan, c: &Constellation, seed: u64) -> Result<Frame> {
    if payload.len() != fp.payload_bits {
        return Err(PasError::Length(format!(
            "frame takes {} payload bits, got {}",
            fp.payload_bits,
            payload.len()
        )));
    }
    let q = c.q();
    if q != fp.plan.q {
        return Err(PasError::InvalidParameter(format!(
            "plan is for q = {}, constellation has q = {q}",
            fp.plan.q
        )));
    }
    let map = RegionMap::new(c)?;
    if map.base_len() != fp.composition.classes() {
        return Err(PasError::InvalidParameter(
            "plan does not match the constellation".into(),
        ));
    }
    let bps = bits_per_symbol(q);
    let (shaped, uncoded) = payload.split_at(fp.dm_symbols * bps);
    let mut dm_input = shaped.to_vec();
    dm_input.resize(fp.dm_bits, false);
    let amplitudes = ccdm_encode(&dm_input, &fp.composition)?;
    let mut regions = symbols_from_bits(uncoded, bps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    regions.extend((0..fp.parity_regions).map(|_| rng.random_range(0..q as u16)));
    let points = amplitudes
        .iter()
        .zip(&regions)
        .map(|(&a, &s)| Ok(c.points()[map.index(a.into(), s.into())?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Frame {
        seed,
        amplitudes,
        regions,
        points,
    })
}

/// Recovers the payload from noiseless (or hard-decided) frame symbols.
pub fn pas_deframe(
    amplitudes: &[u16],
    regions: &[u16],
    fp: &FramePlan,
    q: usize,
) -> Result<Vec<bool>> {
    if regions.len() != fp.points() {
        return Err(PasError::Length(format!(
            "frame has {} regions, plan needs {}",
            regions.len(),
            fp.points()
        )));
    }
    let bps = bits_per_symbol(q);
    let dm = ccdm_decode(amplitudes, &fp.composition)?;
    let (info, padding) = dm.split_at(fp.dm_symbols * bps);
    if padding.iter().any(|&b| b) {
        return Err(PasError::Composition("non-zero matcher padding".into()));
    }
    let mut out = info.to_vec();
    out.extend(bits_from_symbols(&regions[..fp.uncoded_regions], bps));
    Ok(out)
}

/// [`pas_deframe`] after minimum-distance demapping of received points.
pub fn pas_deframe_points(
    points: &[Complex64],
    fp: &FramePlan,
    c: &Constellation,
) -> Result<Vec<bool>> {
    let (a, s) = pas_demap_hard(points, c)?;
    pas_deframe(&a, &s, fp, c.q())
}

impl Frame {
    /// `PASF`, then little-endian u32 point count, uncoded region count,
    /// matcher bits and padding bits, u64 seed, and one `(amplitude, region)`
    /// pair of little-endian u16 per point.
    pub fn to_bytes(&self, fp: &FramePlan) -> Vec<u8> {
        let lengths = fp.plan.lengths.expect("instantiated plan");
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.amplitudes.len());
        out.extend_from_slice(FRAME_MAGIC);
        for v in [
            self.amplitudes.len(),
            fp.uncoded_regions,
            fp.dm_bits,
            lengths.padding_bits,
        ] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.seed.to_le_bytes());
        for (a, s) in self.amplitudes.iter().zip(&self.regions) {
            out.extend_from_slice(&a.to_le_bytes());
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }
}

/// Parsed binary frame: header fields and the symbol pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub uncoded_regions: usize,
    pub dm_bits: usize,
    pub padding_bits: usize,
    pub seed: u64,
    pub amplitudes: Vec<u16>,
    pub regions: Vec<u16>,
}

pub fn parse_frame(bytes: &[u8]) -> Result<FrameRecord> {
    let bad = |m: &str| PasError::Format(m.to_string());
    if bytes.len() < HEADER_LEN || &bytes[..4] != FRAME_MAGIC {
        return Err(bad("missing PASF header"));
    }
    let word =
        |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let n = word(0);
    if bytes.len() != HEADER_LEN + 4 * n {
        return Err(bad("frame length does not match header"));
    }
    let seed = u64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let body = &bytes[HEADER_LEN..];
    let pair =
        |k: usize, off: usize| u16::from_le_bytes([body[4 * k + off], body[4 * k + off + 1]]);
    Ok(FrameRecord {
        uncoded_regions: word(1),
        dm_bits: word(2),
        padding_bits: word(3),
        seed,
        amplitudes: (0..n).map(|k| pair(k, 0)).collect(),
        regions: (0..n).map(|k| pair(k, 2)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{
        make_cqam_greedy, make_pam, make_square_qam, DEFAULT_PHASE_GRID, DEFAULT_RADIUS_STEP,
    };
    use crate::pas::plan::compatibility_residual;
    use crate::shaping::mb_weights;

    fn shaped_cqam() -> Constellation {
        let c = make_cqam_greedy(8, DEFAULT_PHASE_GRID, DEFAULT_RADIUS_STEP).unwrap();
        mb_weights(&c, 1.5).unwrap().constellation
    }

    fn payload(n: usize, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random()).collect()
    }

    #[test]
    fn lengths_satisfy_the_layering_constraint() {
        let c = shaped_cqam();
        for rate in [0.5, 0.6, 0.8] {
            let fp = plan_frame(&c, 1000, rate).unwrap();
            let p = fp.plan;
            let l = p.lengths.unwrap();
            // N R_DM R_AM = (1 - r) M, exactly in integers
            assert_eq!(fp.dm_symbols, l.info_symbols - fp.uncoded_regions);
            assert!(
                (l.output_symbols as f64 * p.r_dm * p.r_am
                    - (1.0 - p.split) * l.info_symbols as f64)
                    .abs()
                    < 1e-9
            );
            assert!(compatibility_residual(p.r_am, p.r_dm, p.r_c, p.split).abs() < 1e-12);
            assert!((p.r_t - l.info_symbols as f64 / l.output_symbols as f64).abs() < 1e-12);
            assert!(p.r_c <= rate + 1e-12);
            assert_eq!(l.padding_bits, fp.dm_bits - 3 * fp.dm_symbols);
        }
        assert_eq!(plan_frame(&c, 1000, 0.5).unwrap().uncoded_regions, 0);
        assert!(plan_frame(&c, 1000, 0.4).is_err());
    }

    #[test]
    fn frame_round_trip_and_composition() {
        let c = shaped_cqam();
        let fp = plan_frame(&c, 1000, 0.6).unwrap();
        let bits = payload(fp.payload_bits, 1);
        let f = pas_frame(&bits, &fp, &c, 42).unwrap();
        assert_eq!(
            Composition::of_sequence(&f.amplitudes, 8).unwrap(),
            fp.composition
        );
        assert_eq!(pas_deframe_points(&f.points, &fp, &c).unwrap(), bits);
        let rec = parse_frame(&f.to_bytes(&fp)).unwrap();
        assert_eq!(rec.amplitudes, f.amplitudes);
        assert_eq!(rec.regions, f.regions);
        assert_eq!(rec.seed, 42);
        assert_eq!(
            pas_deframe(&rec.amplitudes, &rec.regions, &fp, 8).unwrap(),
            bits
        );
        assert!(pas_frame(&bits[1..], &fp, &c, 42).is_err());
    }

    #[test]
    fn parity_regions_look_uniform() {
        // r = 0: every region symbol is mock parity
        let c = shaped_cqam();
        let fp = plan_frame(&c, 2000, 0.5).unwrap();
        assert_eq!(fp.uncoded_regions, 0);
        let mut hist = [0usize; 8];
        for seed in 0..20 {
            let f = pas_frame(&payload(fp.payload_bits, seed), &fp, &c, seed).unwrap();
            for &s in &f.regions {
                hist[usize::from(s)] += 1;
            }
        }
        let total: usize = hist.iter().sum();
        let e = total as f64 / 8.0;
        let chi2: f64 = hist.iter().map(|&h| (h as f64 - e).powi(2) / e).sum();
        // 0.99 quantile of chi-square with 7 degrees of freedom
        assert!(chi2 < 18.475, "{chi2}");
    }

    #[test]
    fn uniform_composition_gives_uniform_points() {
        let c = make_square_qam(2).unwrap();
        let map = RegionMap::new(&c).unwrap();
        let fp = plan_frame_with(&map, Composition::new(vec![25; 4]).unwrap(), 0.5).unwrap();
        let f = pas_frame(&payload(fp.payload_bits, 3), &fp, &c, 3).unwrap();
        let mut by_amp = [0usize; 4];
        f.amplitudes
            .iter()
            .for_each(|&a| by_amp[usize::from(a)] += 1);
        assert_eq!(by_amp, [25; 4]);
    }

    #[test]
    fn pam_and_unsupported_q() {
        let c = make_pam(3).unwrap();
        let fp = plan_frame(&c, 200, 0.7).unwrap();
        assert_eq!(fp.plan.r_am, 2.0);
        let bits = payload(fp.payload_bits, 9);
        let f = pas_frame(&bits, &fp, &c, 1).unwrap();
        assert_eq!(pas_deframe_points(&f.points, &fp, &c).unwrap(), bits);

        let c5 = crate::constellation::make_cqam_star(5, 0.5).unwrap();
        assert!(matches!(
            plan_frame(&c5, 100, 0.6),
            Err(PasError::InvalidParameter(_))
        ));
        assert!(parse_frame(b"XXXX").is_err());
    }
}
