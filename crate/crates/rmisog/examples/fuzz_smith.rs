use rmisog::matz::*;

fn main() {
    let mut seed: u64 = 0x12345678;
    let mut rnd = move || { seed ^= seed << 13; seed ^= seed >> 7; seed ^= seed << 17; seed };
    for trial in 0..20000 {

        let m = 2 + (rnd() % 7) as usize;
        let n = 2 + (rnd() % 4) as usize;
        let a: Vec<Vec<i128>> = (0..m).map(|_| (0..n).map(|_| ((rnd() % 41) as i128) - 20).collect()).collect();
        let s = smith(&a);
        let paq = mat_mul(&mat_mul(&s.p, &a), &s.q);
        for i in 0..m { for j in 0..n {
            let want = if i == j && i < s.diag.len() { s.diag[i] } else { 0 };
            assert_eq!(paq[i][j], want, "trial {trial} PAQ mismatch at ({i},{j}) for {a:?}");
        }}
        for w in s.diag.windows(2) {
            if w[0] != 0 { assert_eq!(w[1] % w[0], 0, "trial {trial} divisibility {:?} {a:?}", s.diag); }
            else { assert_eq!(w[1], 0, "trial {trial}"); }
        }
        if m <= 5 {
            assert_eq!(det(&s.p).abs(), 1, "trial {trial} P not unimodular");
        }
        assert_eq!(det(&s.q).abs(), 1, "trial {trial} Q not unimodular");
        let prod = mat_mul(&s.q, &s.qinv);
        assert_eq!(prod, identity(n), "trial {trial} qinv wrong");
    }
    println!("20000 trials OK");
}
