//! Special functions against independent references: arbitrary-precision
//! Bessel values frozen into the table below, direct harmonic summation and
//! closed forms.

use proptest::prelude::*;
use vdw_core::specfun::{
    bessel_ik, hermite_function, ik_uniform_product, vsh_sum, vsh_sum_direct, VshKind,
};

/// (order, x, ln I, ln K, x I'/I, x K'/K) from 40-digit arithmetic.
const BESSEL_REF: &[(f64, f64, f64, f64, f64, f64)] = &[
    (0.3, 0.01, -1.4813011697677152676, 1.9300859816189330927, 0.30003846121688052298, -0.33836499955591249329),
    (0.3, 0.5, -0.26012950844290217002, -0.02380702734543257338, 0.39420077857293994745, -0.93414784690636663167),
    (0.3, 2.0, 0.77824079836986178366, -2.1538463942836319554, 1.4855223148457350445, -2.47195031177841258),
    (0.3, 10.0, 7.9382180864719894668, -10.933136977225417797, 9.4910418640170611015, -10.492697094094095472),
    (0.3, 100.0, 96.779280415513187208, -102.0775897807965681, 99.499191874205456578, -100.49920787926539281),
    (0.3, 1000.0, 995.62726386734538873, -1003.2281662468873447, 999.49991991987654647, -1000.4999200798770522),
    (0.3, 20000.0, 19994.129321690627268, -20004.725956423523342, 19999.499995999799985, -20000.499996000199985),
    (0.5, 0.01, -2.5283597790276616421, 2.5183764456387731058, 0.5000333331111132379, -0.5099999999999999898),
    (0.5, 0.5, -0.53104008831178197809, 0.072364942924700087072, 0.58197670686932642439, -1.0),
    (0.5, 2.0, 0.71600242968946804298, -2.1207822376352452223, 1.5746294414550961918, -2.5),
    (0.5, 10.0, 7.9297689182371507916, -10.92550119385229541, 9.5000000412230725615, -10.499999999999999972),
    (0.5, 100.0, 96.778476373801281574, -102.07679374034931825, 99.50000000000000001, -100.49999999999999999),
    (0.5, 1000.0, 995.62718382730425873, -1003.2280862868463411, 999.50000000000000001, -1000.5),
    (0.5, 20000.0, 19994.129317690527263, -20004.725952423623337, 19999.5, -20000.5),
    (1.5, 0.01, -8.2321489203092598165, 7.133496962480032536, 1.5000199999428574281, -1.5000990099009900678),
    (1.5, 0.5, -2.3392130423923242719, 1.1709772315928097785, 1.5496467783038448822, -1.6666666666666666667),
    (1.5, 2.0, 0.094831145661342802365, -1.7153171295270808404, 2.2222133004134165556, -2.8333333333333333333),
    (1.5, 10.0, 7.8244084071596658726, -10.83019101404797055, 9.6111110602184291483, -10.590909090909090965),
    (1.5, 100.0, 96.768426037947780133, -102.06684340949615017, 99.510101010101010045, -100.50990099009900996),
    (1.5, 1000.0, 995.6261833269706752, -1003.2270867865132576, 999.50100100100100103, -1000.500999000999001),
    (1.5, 20000.0, 19994.129267689277222, -20004.725902424873295, 19999.500050002500125, -20000.500049997500125),
    (2.7, 0.01, -15.733522459593188062, 14.047115557046763734, 2.7000135134940864831, -2.7000294111479731649),
    (2.7, 0.5, -5.1542054453380924554, 3.448676238963105876, 2.733663079158650841, -2.7706347269124540298),
    (2.7, 2.0, -1.1651172829800664494, -0.74816969236247951844, 3.2121252295194676493, -3.5631973262663761602),
    (2.7, 10.0, 7.5609169360108419857, -10.591118046580057693, 9.8844160827488616335, -10.816979357450500684),
    (2.7, 100.0, 96.743100715200889302, -102.04177001062416513, 99.535550938676826485, -100.53484722321738071),
    (2.7, 1000.0, 995.62366206761288831, -1003.2245680471478603, 999.50352351907054058, -1000.5035164790989824),
    (2.7, 20000.0, 19994.129141686127301, -20004.725776428023375, 19999.500176008799885, -20000.500175991199886),
    (5.5, 0.01, -34.803303729718483179, 32.405406747521826198, 5.5000076923037476526, -5.5000111110934743907),
    (5.5, 0.5, -13.277571815830622107, 10.8754242407281091, 5.5192061700340730593, -5.5276687478391734966),
    (5.5, 2.0, -5.5102568830384014629, 3.0488135789983072116, 5.8016000473046303817, -5.9201172916296427937),
    (5.5, 10.0, 6.392884239592816365, -9.5208881490734118862, 11.031038401810584085, -11.797328145902624772),
    (5.5, 100.0, 96.627757380413471627, -101.92757272466016934, 99.651405980863810404, -100.64841406467453372),
    (5.5, 1000.0, 995.61217635740546238, -1003.2130938167450474, 999.51501490959523281, -1000.5149849104052172),
    (5.5, 20000.0, 19994.128567671781014, -20004.725202442377086, 19999.500750037488748, -20000.500749962488752),
    (20.5, 0.01, -152.46743071211924444, 148.75385852615436663, 20.500002325581275591, -20.500002564102385983),
    (20.5, 0.5, -72.268053474646961572, 68.554183346300214255, 20.50581320251737295, -20.506409146238832587),
    (20.5, 2.0, -43.805462180390562569, 40.087142543560085546, 20.592831717244070132, -20.602281448168506996),
    (20.5, 10.0, -9.7238832295533665264, 5.9034411061401526433, 22.716029780515639989, -22.908345686428049626),
    (20.5, 100.0, 94.67534942162731275, -99.994240564739642019, 101.59884640331174916, -102.55852871943977161),
    (20.5, 1000.0, 995.41708609332624099, -1003.0181985090952945, 999.71018818178828592, -1000.7097683568564646),
    (20.5, 20000.0, 19994.118817428933025, -20004.715452687028824, 19999.510500522282581, -20000.510499472283672),
    (100.5, 0.01, -898.52659328704901757, 893.22328837403907915, 100.50000049261083835, -100.50000050251255944),
    (100.5, 0.5, -505.36766572612853061, 500.06434844106599506, 100.50123151969534759, -100.50125627339575275),
    (100.5, 2.0, -366.03584645196143398, 360.73234354861962128, 100.5197025398838848, -100.52009845202054032),
    (100.5, 10.0, -204.05117757552475907, 198.7429461658634006, 100.99143270456339181, -101.00123730498285406),
    (100.5, 100.0, 49.446508107101107448, -55.093903732893745611, 141.5272646022835786, -142.02476316532608886),
    (100.5, 1000.0, 990.5789065955803478, -998.18483373041137561, 1004.5423196592264636, -1005.5323206201945532),
    (100.5, 20000.0, 19993.876811909089378, -20004.473459267026111, 19999.752511031742013, -20000.752485782379371),
    (149.5, 0.01, -1394.6124010034039354, 1388.9119574277760374, 149.50000033222591637, -149.5000003367003332),
    (149.5, 0.5, -809.76454657618620397, 804.06409740979795674, 149.50083056250737295, -149.50084174843991895),
    (149.5, 2.0, -602.50731049801284956, 596.80677744416942293, 149.51328845376232591, -149.51346739865203575),
    (149.5, 10.0, -361.73696494058668928, 356.03428914688833466, 149.8318624342356228, -149.83631692207058672),
    (149.5, 100.0, -1.8553706462413426922, -4.029967979766189273, 179.70772157821123687, -180.01683788773329917),
    (149.5, 1000.0, 984.46732768651903066, -992.07928211126008476, 1010.624194510879472, -1011.6023330520857028),
    (149.5, 20000.0, 19993.570556323105143, -20004.167218992920847, 20000.058770133213309, -20001.058714261334736),
    (150.5, 0.01, -1404.9246814552373576, 1399.2175711882809033, 150.50000033003300608, -150.50000033444815703),
    (150.5, 0.5, -816.16480676262175403, 810.45769097895679942, 150.50082508027625907, -150.50083611804748809),
    (150.5, 2.0, -607.52131743754838661, 601.81411887745289129, 150.51320074878818753, -150.51337732388711142),
    (150.5, 10.0, -365.14258478422697611, 359.43327180092437432, 150.82967664848055328, -150.83407239398229097),
    (150.5, 100.0, -3.0524432591318054713, -2.8375107117888697181, 180.54118674123973687, -180.84746286138802025),
    (150.5, 1000.0, 984.31781114605818241, -991.92991227026489675, 1010.7726786384190428, -1011.7505302365464905),
    (150.5, 20000.0, 19993.563056205917036, -20004.159719250711648, 20000.066270297270638, -20001.06621367547644),
    (300.5, 0.01, -3009.9033583600076599, 3003.5047634249187379, 300.50000016583748548, -300.50000016694490188),
    (300.5, 0.5, -1834.3402380149904553, 1827.9416416961710266, 300.50041459341406389, -300.5004173619786735),
    (300.5, 2.0, -1417.7556730638388994, 1411.3570559812160616, 300.50663342643965639, -300.50667772163380689),
    (300.5, 10.0, -934.03998972951288732, 927.64084138691145082, 300.66579204612624103, -300.66689824993320867),
    (300.5, 100.0, -234.01390722963492227, 227.5627978807693953, 316.65243430609713123, -316.75213553999753552),
    (300.5, 1000.0, 950.78645414160402351, -958.43058309805076022, 1043.7157810465361876, -1044.6329596173017269),
    (300.5, 20000.0, 19991.871803722918305, -20002.468551318275952, 20001.757485464709097, -20002.757259765658959),
    (800.5, 0.01, -8796.5965570071665207, 8789.2181732940917785, 800.50000006238304848, -800.50000006253907026),
    (800.5, 0.5, -5665.0220632143411528, 5657.6436793062755837, 800.500155957564384, -800.50015634770201675),
    (800.5, 2.0, -4555.2922574569882638, 4547.9138706228990108, 800.50249531739310674, -800.50250155955870097),
    (800.5, 10.0, -3266.907265303393166, 3259.528803568927168, 800.5623806073040754, -800.56253663806854718),
    (800.5, 100.0, -1420.6059682802724519, 1413.2198420688992329, 806.71424263273842368, -806.72960835258371309),
    (800.5, 1000.0, 689.62723277332143928, -697.47572731716805454, 1280.6325818855492089, -1281.2420404633950799),
    (800.5, 20000.0, 19978.111055133893539, -19988.70849022607601, 20015.514388902791505, -20016.512789465078845),
];

#[test]
fn bessel_matches_high_precision_table() {
    for &(p, x, ln_i, ln_k, li, lk) in BESSEL_REF {
        let b = bessel_ik(p, x).unwrap();
        let got_i = b.i.ln() + b.eta;
        let got_k = b.k.ln() - b.eta;
        let tol = 2e-14 * ln_i.abs().max(1.0);
        assert!((got_i - ln_i).abs() < tol, "ln I p={p} x={x}: {got_i} vs {ln_i}");
        assert!((got_k - ln_k).abs() < 2e-14 * ln_k.abs().max(1.0), "ln K p={p} x={x}: {got_k} vs {ln_k}");
        assert!((b.log_deriv_i() / li - 1.0).abs() < 1e-13, "x I'/I p={p} x={x}");
        assert!((b.log_deriv_k() / lk - 1.0).abs() < 1e-13, "x K'/K p={p} x={x}");
    }
}

#[test]
fn uniform_product_agrees_with_backbone() {
    let (m, e) = ik_uniform_product(50.0, 1.0, 50.0, 1.0, 4).unwrap();
    let b = bessel_ik(50.0, 50.0).unwrap();
    let direct = b.product();
    assert!((m * e.exp() / direct - 1.0).abs() < 1e-6);
}

#[test]
fn uniform_product_off_diagonal() {
    let (m, e) = ik_uniform_product(40.5, 0.8, 40.5, 0.9, 6).unwrap();
    let bi = bessel_ik(40.5, 40.5 * 0.8).unwrap();
    let bk = bessel_ik(40.5, 40.5 * 0.9).unwrap();
    let ln_direct = bi.i.ln() + bi.eta + bk.k.ln() - bk.eta;
    assert!((m.ln() + e - ln_direct).abs() < 1e-9);
}

fn angle_pairs() -> Vec<(f64, f64)> {
    // fixed low-discrepancy points away from the poles
    (0..20)
        .map(|i| {
            let u = (i as f64 + 0.5) / 20.0;
            let theta = 0.15 + 2.8 * u;
            let phi = (i as f64 * 2.399_963_229_728_653) % (2.0 * std::f64::consts::PI);
            (theta, phi)
        })
        .collect()
}

#[test]
fn vector_harmonic_sums_match_direct_summation() {
    for l in 1..=10u32 {
        for kind in VshKind::ALL {
            let cf = vsh_sum(kind, l);
            for (theta, phi) in angle_pairs() {
                let (re, im) = vsh_sum_direct(kind, l, theta, phi);
                for i in 0..3 {
                    for j in 0..3 {
                        let scale = cf[i][j].abs().max(1.0);
                        assert!((re[i][j] - cf[i][j]).abs() < 1e-12 * scale, "{kind:?} l={l} ({i},{j})");
                        assert!(im[i][j].abs() < 1e-12 * scale);
                    }
                }
            }
        }
    }
}

#[test]
fn trap_wavefunction_small_argument_form() {
    // psi_l = phi_{2l+1}(xi) / (xi sqrt(2 pi)) against the sine form
    for l in [20usize, 30, 50] {
        let k = (4.0 * l as f64 + 3.0).sqrt();
        let amp = 1.0 / ((4.0 * l as f64 + 2.0).powf(0.25) * std::f64::consts::PI);
        for i in 1..=10 {
            let xi = 0.05 * i as f64;
            let (phi, _) = hermite_function(2 * l + 1, xi);
            let psi = phi / (xi * (2.0 * std::f64::consts::PI).sqrt());
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let asym = sign * amp * (k * xi).sin() / xi;
            let envelope = amp / xi;
            assert!((psi - asym).abs() < 0.02 * envelope, "l={l} xi={xi}: {psi} vs {asym}");
        }
    }
}

proptest! {
    #[test]
    fn wronskian_everywhere(p in 0.0f64..450.0, lx in -3.0f64..4.0) {
        let x = 10f64.powf(lx);
        let b = bessel_ik(p, x).unwrap();
        let w = x * (b.i * b.dk - b.di * b.k);
        prop_assert!((w + 1.0).abs() < 1e-11);
    }

    #[test]
    fn order_recurrence(p in 0.0f64..300.0, lx in -2.0f64..3.5) {
        // K_{p+1} = K_{p-1} + (2p/x) K_p on the scaled values
        let x = 10f64.powf(lx);
        let p = p + 1.0;
        let a = bessel_ik(p - 1.0, x).unwrap();
        let b = bessel_ik(p, x).unwrap();
        let c = bessel_ik(p + 1.0, x).unwrap();
        let ka = a.k.ln() - a.eta;
        let kb = b.k.ln() - b.eta;
        let kc = c.k.ln() - c.eta;
        let rhs = (ka - kc).exp() + 2.0 * p / x * (kb - kc).exp();
        prop_assert!((rhs - 1.0).abs() < 1e-11);
    }
}
