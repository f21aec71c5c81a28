//! Reference table values used by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

/// Coupling values of the excited-state tables, in column order.
pub const EXCITED_LAMBDAS: [f64; 3] = [0.1, 1.0, 100.0];

/// Ground state, λ = 1, chain depth 1, orders K = 0 … 15.
pub const TABLE_1: [f64; 16] = [
    0.847907429,
    0.847907429,
    0.8041081069829833,
    0.8039091999664616,
    0.8037978280048715,
    0.8037792238820139,
    0.8037726920274627,
    0.8037713351909546,
    0.8037708048619517,
    0.8037707015253137,
    0.8037706427848315,
    0.8037706383463737,
    0.8037706263550815,
    0.8037706301691552,
    0.8037706243946594,
    0.8037706287404748,
];

/// Printed chain frequencies `W₁ … W₄` at λ = 1.
pub const CHAIN_W: [f64; 4] = [2.52510225481, 2.90538656129, 3.21090388686, 3.46974595594];

/// Ground state, λ = 1, chain depths 2, 3, 4 (columns), orders K = 0 … 15.
pub const TABLE_2: [[f64; 3]; 16] = [
    [0.901242878, 0.953331243, 1.00178467],
    [0.901242878, 0.953331243, 1.00178467],
    [0.8022224007956986, 0.8042036141630704, 0.8092189699904901],
    [0.8054651813042190, 0.8096942202109880, 0.8159975210361090],
    [0.8037461158266676, 0.8035523554262308, 0.8036525961629886],
    [0.8038036096317446, 0.8040771905224384, 0.8048413909234290],
    [0.8037708004664887, 0.8037491193175370, 0.8037061119915903],
    [0.8037713901307034, 0.8037870364646635, 0.8038694389755376],
    [0.8037706721375962, 0.8037690121024319, 0.8037599392046063],
    [0.8037706545007351, 0.8037715434308201, 0.8037800051832189],
    [0.8037706342530531, 0.8037705356047065, 0.8037692091978080],
    [0.8037706322885981, 0.8037706977772240, 0.8037715412805357],
    [0.8037706314198754, 0.8037706406762437, 0.8037704590622494],
    [0.8037706312900128, 0.8037706508130255, 0.8037707215178032],
    [0.8037706312192222, 0.8037706475443096, 0.8037706116069788],
    [0.8037706312169512, 0.8037706481678014, 0.8037706405540735],
];

/// Couplings of the late-order ground-state table.
pub const TABLE_3_LAMBDAS: [f64; 3] = [0.01, 10.0, 100.0];

/// Ground state, chain depth 1, orders K = 13, 14, 15 (rows).
pub const TABLE_3: [[f64; 3]; 3] = [
    [0.5072562106523008, 1.504972427622453, 3.131384278221808],
    [0.5072562106523008, 1.504972406538491, 3.131384221926994],
    [0.5072562106523008, 1.504972417516847, 3.131384248591904],
];

/// Excited states n = 1 … 10 with ground-state chain:1 parameters, K = 15.
/// `None` marks a level the series failed to converge for.
pub const TABLE_5: [[Option<f64>; 3]; 10] = [
    [
        Some(1.769502633601580),
        Some(2.737893473247960),
        Some(11.18727013754662),
    ],
    [
        Some(3.138624640483820),
        Some(5.179368610682413),
        Some(21.90792389514790),
    ],
    [
        Some(4.628893580258386),
        Some(7.944276200342911),
        Some(34.20660264641097),
    ],
    [
        Some(6.220490587163873),
        Some(10.98830903940391),
        Some(48.00716948459711),
    ],
    [
        Some(7.901913609979696),
        Some(14.41671095662173),
        Some(65.17919098201246),
    ],
    [Some(9.674274270406038), None, None],
    [Some(11.58029965657092), None, None],
    [None, None, None],
    [None, None, None],
    [None, None, None],
];

/// Single-step variational parameters, K = 14.
pub const TABLE_6: [[f64; 3]; 10] = [
    [1.769502526042401, 2.737826568159874, 11.18590665985774],
    [3.138624260783390, 5.179278503183649, 21.90667970339865],
    [4.628882799032086, 7.942400664976592, 34.18247662808967],
    [6.220300899387960, 10.96358201989640, 47.70719233011905],
    [7.899767255018711, 14.20313874402137, 62.28123351170720],
    [9.657840024381196, 17.63404895868295, 77.77076877553597],
    [11.48731562245528, 21.23643543180502, 94.07804796313151],
    [13.38247490877576, 24.99493650263666, 111.1279601151626],
    [15.33864203774306, 28.89725106727866, 128.8606294268705],
    [17.35190767828287, 32.93326317015690, 147.2269956471010],
];

/// Single-step variational parameters, K = 15.
pub const TABLE_7: [[f64; 3]; 10] = [
    [1.769502734911583, 2.737955961049832, 11.18865883835119],
    [3.138624351464486, 5.179303188325927, 21.90710180727473],
    [4.628882837847637, 7.942406660726320, 34.18256466416197],
    [6.220300917364425, 10.96358385150704, 47.70721635883445],
    [7.899767264110872, 14.20313941758235, 62.28124490910177],
    [9.657840029418940, 17.63404924938320, 77.77077204538597],
    [11.48731562551444, 21.23643557566123, 94.07804949179396],
    [13.38247489117164, 24.99493657142581, 111.1279607854576],
    [15.33864207925654, 28.89725105542083, 128.8606292267516],
    [17.35190767499986, 32.93326304139077, 147.2269943696901],
];

/// Two-step variational parameters, K = 14.
pub const TABLE_8: [[f64; 3]; 10] = [
    [1.769502595495307, 2.737892280858456, 11.18829020411844],
    [3.138624197794214, 5.179291722504740, 21.90689767968495],
    [4.628882511628982, 7.942403919498243, 34.18252348780879],
    [6.220300863131970, 10.96358293850466, 47.70720519550517],
    [7.899767113294260, 14.20313925236565, 62.28123822043900],
    [9.657840059798382, 17.63404889881106, 77.77077201647030],
    [11.48731530776505, 21.23643596676358, 94.07805770355252],
    [13.38247452708933, 24.99493915652584, 111.1279999324749],
    [15.33864161377721, 28.89726023457015, 128.8606564368714],
    [17.35190770598516, 32.93326418012689, 147.2269846271021],
];

/// Two-step variational parameters, K = 15.
pub const TABLE_9: [[f64; 3]; 10] = [
    [1.769502595720013, 2.737892290808430, 11.18725175268262],
    [3.138624197891925, 5.179291724439308, 21.90689768817313],
    [4.628882511666889, 7.942403920161726, 34.18252348715269],
    [6.220300863145563, 10.96358293822675, 47.70720518995203],
    [7.899767113290646, 14.20313925025467, 62.28123817953492],
    [9.657840059675530, 17.63404886347468, 77.77077131768290],
    [11.48731530570292, 21.23643553577421, 94.07805012397570],
    [13.38247450558015, 24.99493599000598, 111.1279501536521],
    [15.33864146634275, 28.89724877539235, 128.8606557529643],
    [17.35190696572501, 32.93326503128077, 147.2269836271021],
];

/// `|a − b| / |b|`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
