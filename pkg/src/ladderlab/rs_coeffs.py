"""Taylor tables for the asymptotic correction terms C0..C4 of Z(t).

Generated by scripts/gen_rs_coeffs.py; do not edit by hand.

Each table holds the coefficients of C_k(1/2 + u) in the
variable w = u^2; tables marked "odd" carry an overall
factor u.  Valid for u in [-1/2, 1/2]; the truncation
error of every table is below 1e-24 there.
"""

PARITY = {
    "C0": "even",
    "C1": "odd",
    "C2": "even",
    "C3": "odd",
    "C4": "even",
}

C0_W = (
    0.3826834323650898,
    1.7489618723100817,
    2.118025207685496,
    -0.8707216670511481,
    -3.4733112243465167,
    -1.6626947308999325,
    1.216731288919232,
    1.3014304161007977,
    0.03051102182736167,
    -0.3755803051545095,
    -0.1085784416564066,
    0.051832902999549624,
    0.029999480619902277,
    -0.0022759396706125644,
    -0.004382647416580339,
    -0.0004064230183729847,
    0.0004006097785422114,
    8.971057991388841e-05,
    -2.3025650027239108e-05,
    -9.380006601906792e-06,
    6.323514947609108e-07,
    6.551022819231502e-07,
    2.210523745552697e-08,
    -3.322316176445629e-08,
    -3.734910989933656e-09,
    1.2445067060797738e-09,
    2.476820537650219e-10,
)

C1_W = (
    -0.053650205256750697,
    0.11027818741081483,
    1.2317200154315227,
    1.2634964862799458,
    -1.695108997559503,
    -2.9998711967650102,
    -0.10819944959899208,
    1.9407662946212714,
    0.7838423561500687,
    -0.5054829667900366,
    -0.38450723496057976,
    0.03747264646531532,
    0.09092026610973176,
    0.01044923755006451,
    -0.012582979651583417,
    -0.003399503721151274,
    0.0010410950537714891,
    0.0005010949051118486,
    -3.956359669003182e-05,
    -4.7624592453571896e-05,
    -1.8539355338085133e-06,
    3.1936918080068973e-06,
    4.0907807608506065e-07,
    -1.5446624332576631e-07,
    -3.466307491769133e-08,
    5.158711258806155e-09,
    1.9845392556407944e-09,
)

C2_W = (
    0.005188542830293168,
    0.0012378633552253898,
    -0.18137505725166997,
    0.14291492748532125,
    1.3303391766687565,
    0.3522472353403734,
    -2.421001595891951,
    -1.6760787022538108,
    1.3689416723328371,
    1.5539019430222982,
    -0.1722164273472998,
    -0.6359068055045431,
    -0.09911649873041208,
    0.14033480067387008,
    0.04782352019827292,
    -0.017356040641479782,
    -0.010225012534028593,
    0.0009274149159794888,
    0.0013572194372373386,
    6.41369012029388e-05,
    -0.0001230080569819663,
    -1.83135074047892e-05,
    7.821628604322627e-06,
    2.0087542484759946e-06,
    -3.3532765393185714e-07,
    -1.4616020917418232e-07,
    7.261497384040072e-09,
    7.894805679006707e-09,
)

C3_W = (
    -0.0026794321814389136,
    0.02995372109103515,
    -0.042570172541828696,
    -0.28997965779803886,
    0.4888831999235446,
    1.230855876395746,
    -0.8297560708527408,
    -2.249763536666567,
    0.07845139961005472,
    1.7467492800868893,
    0.45968080979749937,
    -0.6619353471039775,
    -0.31590441036173633,
    0.12844792545207495,
    0.10073382716626152,
    -0.009530183848825268,
    -0.019264421687514088,
    -0.001246463715876929,
    0.0024243969641103086,
    0.000437647697741857,
    -0.00020714032687001792,
    -6.274344504186516e-05,
    1.157534381459567e-05,
    5.88385492454038e-06,
    -3.124677400696336e-07,
    -4.0240657754989595e-07,
    -1.199110779489633e-08,
    2.0963754063938708e-08,
    2.0203560225402153e-09,
)

C4_W = (
    0.0004782290257029688,
    0.0027378432141086095,
    -0.012165600122073371,
    -0.17357396211146064,
    -0.2903815671075243,
    0.8163771687968117,
    1.9171963341605731,
    -0.5176393162947811,
    -3.1871738628692694,
    -0.8657370399355723,
    2.16875524612676,
    1.1986762844209313,
    -0.6909617466079353,
    -0.6182538426085729,
    0.08368946168197477,
    0.17647566216377802,
    0.011783219625222122,
    -0.03152047246799052,
    -0.006411573632260051,
    0.003685825190501232,
    0.0012561295600412529,
    -0.0002746703858704865,
    -0.00015506946236361525,
    9.863027212846661e-06,
    1.3614197547073211e-05,
    4.253156460145671e-07,
    -8.926074154733512e-07,
    -9.414107715859985e-08,
    4.449610324211613e-08,
    8.008613143675032e-09,
)
