#![allow(clippy::excessive_precision)]
// Generated offline with mpmath at 50 significant digits.
pub struct StatsCase { pub a: &'static [f64], pub b: &'static [f64], pub t: f64, pub df: f64, pub welch_p: f64, pub u: f64, pub mw_p: f64 }
pub const STATS_CASES: [StatsCase; 20] = [
    StatsCase { a: &[4.0, 5.0, 3.0, 2.0, 4.0, 4.0, 3.0, 5.0, 3.0, 4.0, 5.0, 4.0, 4.0, 5.0, 3.0, 4.0, 5.0, 4.0, 4.0, 3.0, 5.0, 3.0, 4.0, 5.0, 5.0, 3.0, 3.0, 5.0, 5.0], b: &[4.0, 5.0, 4.0, 5.0, 3.0, 4.0, 5.0, 5.0, 4.0, 4.0, 5.0, 3.0, 5.0, 4.0, 5.0, 5.0, 5.0, 5.0, 4.0, 4.0, 3.0, 4.0, 3.0, 4.0], t: -1.1209689000067989, df: 50.996193390799617, welch_p: 0.26755221878485374, u: 296.0, mw_p: 0.32694585163335266 },
    StatsCase { a: &[-4.559, 0.079, 2.013, 0.892, -1.836], b: &[2.891, -1.385, 0.315, 2.147, 0.052, -0.016, -0.375, 0.724, -1.865, 0.689, 0.441, 1.114, 0.921, 0.413, 1.151], t: -0.97318750949945062, df: 4.5821811826102842, welch_p: 0.37898904942233009, u: 29.0, mw_p: 0.48499131946716778 },
    StatsCase { a: &[1.0, 3.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 2.0, 3.0, 1.0, 2.0], b: &[2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 2.0, 3.0, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 5.0, 2.0, 1.0, 1.0, 1.0, 3.0, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0], t: 2.7331908442045489, df: 21.479679248787533, welch_p: 0.012299739735784466, u: 291.5, mw_p: 0.0039719432583886974 },
    StatsCase { a: &[0.585, -0.158, -1.796, 0.062, 0.41, 0.621, -1.038, -0.18, -0.8, 1.111, -1.241, 0.084, -0.065, -0.286, 2.052, -1.205, 0.587, 1.974], b: &[-0.669, 2.258, -0.394, 2.562, 1.579, 0.594, -2.816, 1.577, 2.312, 1.302, -0.617, 0.84, 0.866, 1.04, 0.886, -1.223, 0.128, 7.045, -1.304, 0.789, 1.622], t: -1.6959402033676612, df: 31.497905278021785, welch_p: 0.099761262783572365, u: 124.0, mw_p: 0.069204612413657701 },
    StatsCase { a: &[2.0, 3.0, 1.0, 3.0, 2.0, 2.0, 2.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], b: &[1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 3.0, 1.0, 2.0, 2.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0], t: 1.5447650788270949, df: 19.909656383292434, welch_p: 0.13815025366157611, u: 334.0, mw_p: 0.10620442383853743 },
    StatsCase { a: &[-0.303, 0.139, -0.39, 0.668, -0.587], b: &[2.622, 3.35, 1.56, 3.515, 3.199, 1.99, 2.988, 2.872, 2.658, 4.144, 2.116, 2.783, 3.399, 2.425, 3.321, -0.552, 3.367, 2.261, 3.585, 2.531, 3.383, 1.927, 1.926, 2.491, 3.668], t: -9.5344112158823149, df: 10.726747218021932, welch_p: 1.4427970103733176e-6, u: 4.0, mw_p: 0.0012482348851779704 },
    StatsCase { a: &[4.0, 4.0, 4.0, 5.0, 4.0, 5.0, 5.0, 5.0, 3.0], b: &[4.0, 3.0, 4.0, 2.0, 4.0, 4.0, 4.0, 5.0, 4.0], t: 1.5249857033260467, df: 15.586933614330875, welch_p: 0.14729504135696506, u: 55.5, mw_p: 0.15434176147933572 },
    StatsCase { a: &[0.413, -2.343, -0.461, -0.793, 0.271, -0.481, -0.013, 0.62, 3.87, -1.722, 1.305, -0.642, 0.069, -1.181, 0.467, 2.055, 0.541, -1.71], b: &[1.06, 0.274, 0.472, 1.018, 2.501, 0.387, 0.346, -0.486], t: -1.4739730218386609, df: 21.533417771131588, welch_p: 0.15495882594524145, u: 45.0, mw_p: 0.14096087839135003 },
    StatsCase { a: &[2.0, 3.0, 4.0, 2.0, 4.0, 3.0, 4.0, 1.0, 3.0, 3.0, 2.0, 5.0, 5.0, 3.0, 4.0], b: &[4.0, 5.0, 5.0, 3.0, 4.0, 5.0, 5.0, 3.0, 5.0, 5.0, 4.0, 5.0, 3.0, 4.0, 5.0, 4.0, 4.0, 4.0, 5.0, 5.0, 5.0, 4.0, 5.0, 5.0, 5.0, 5.0, 5.0, 3.0], t: -3.7510990497682798, df: 20.451024590385875, welch_p: 0.0012197787742942812, u: 82.0, mw_p: 0.00059778258211496997 },
    StatsCase { a: &[-0.628, -1.215, 3.268, -0.192, 0.531, -0.039, 1.708, 1.004, 0.629, -0.228, -1.77, -0.063, -0.077, -0.502, 1.399, 1.735, 0.254, -1.072, -0.141, 0.737], b: &[1.619, 1.959, 3.306, 2.506, 3.28, 4.414, 6.742, 0.526, 2.783, 2.345, 4.496, 3.046], t: -5.3105476549001408, df: 18.098347676357376, welch_p: 4.6797950941641501e-5, u: 16.0, mw_p: 5.6078493832858054e-5 },
    StatsCase { a: &[4.0, 2.0, 3.0, 1.0, 2.0, 2.0, 1.0, 3.0, 3.0, 1.0, 2.0, 3.0, 1.0, 3.0, 4.0, 2.0, 2.0, 1.0, 3.0, 2.0, 3.0, 1.0, 2.0, 2.0, 1.0, 1.0, 2.0, 1.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0], b: &[1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], t: 4.9509803391442285, df: 44.068768337604725, welch_p: 1.1298383563273314e-5, u: 762.0, mw_p: 2.6501764255595585e-5 },
    StatsCase { a: &[-1.637, -0.87, 0.231, 0.948, -0.895, 0.681, 0.788, -1.153, -0.787, -1.108], b: &[2.226, 2.823, 1.884, 1.983, 0.557, 1.089, 2.45, 1.944, 2.625, 2.033, 0.066, 1.672, 1.747, 1.121, 1.38, 2.369, 1.431, 2.412, 1.528, -1.629], t: -5.2287879476882433, df: 19.51652674824257, welch_p: 4.3949850803319802e-5, u: 16.0, mw_p: 0.00023924109324458333 },
    StatsCase { a: &[3.0, 3.0, 3.0, 5.0, 3.0, 3.0, 2.0, 4.0, 4.0, 1.0, 3.0, 1.0, 3.0, 3.0, 3.0, 2.0, 4.0, 4.0, 3.0, 5.0], b: &[5.0, 4.0, 5.0, 5.0, 5.0, 4.0, 4.0, 5.0, 4.0, 5.0, 5.0, 3.0, 5.0, 5.0, 5.0], t: -5.1744111038260912, df: 31.524728019165467, welch_p: 1.2452123118225208e-5, u: 37.0, mw_p: 9.0086279205372849e-5 },
    StatsCase { a: &[-0.583, 0.37, 1.976, 1.143, 1.735, -1.323, -0.255, 1.617, 1.592, -0.257, 0.99, 2.857, -2.205, 0.235, 1.372, -1.24], b: &[0.172, -2.706, 4.106, 0.254, 0.441, 1.673, -1.308, -1.324, 2.989, -2.447], t: 0.40032004775058465, df: 13.403325551401536, welch_p: 0.69522836151140843, u: 91.0, mw_p: 0.57999050385500837 },
    StatsCase { a: &[5.0, 2.0, 3.0, 2.0, 4.0, 4.0, 4.0, 3.0, 1.0, 2.0, 3.0, 3.0, 4.0, 3.0, 3.0, 4.0, 1.0, 3.0, 3.0, 1.0, 3.0, 3.0, 3.0, 1.0, 3.0, 3.0, 2.0, 4.0, 2.0, 3.0, 2.0, 3.0, 4.0, 3.0, 4.0, 2.0], b: &[2.0, 4.0, 1.0, 4.0, 4.0, 2.0, 4.0, 3.0, 4.0, 3.0, 2.0, 4.0, 4.0, 5.0, 4.0, 1.0, 4.0, 2.0, 3.0, 1.0, 2.0, 3.0, 2.0, 4.0, 3.0, 3.0, 3.0, 4.0, 5.0, 4.0, 2.0, 5.0, 3.0, 2.0, 3.0, 4.0, 4.0, 2.0, 2.0], t: -0.99120713910897422, df: 72.875896175452119, welch_p: 0.3248641862511485, u: 611.5, mw_p: 0.32109151927416196 },
    StatsCase { a: &[-3.705, -0.659, 1.209, 0.709, 0.303, 0.481, -0.149, 2.67, 2.506, 2.248, -0.17, -1.547, 1.139, 2.224, -0.263, 1.149], b: &[-1.451, -1.32, 1.558, 2.907, 1.828, 0.105, 1.227, 2.199, 2.984, 0.138, -0.088, 1.128, 0.389, 1.002], t: -0.70935902714303861, df: 27.938746996160732, welch_p: 0.48397995346619059, u: 97.0, mw_p: 0.54665973067837245 },
    StatsCase { a: &[5.0, 5.0, 3.0, 4.0, 3.0, 4.0, 4.0, 3.0, 5.0, 3.0, 4.0, 4.0, 4.0, 5.0, 3.0, 3.0, 2.0, 1.0, 2.0, 5.0, 5.0, 3.0, 1.0, 3.0, 3.0, 3.0, 2.0, 2.0, 2.0, 4.0, 4.0, 3.0, 2.0], b: &[3.0, 4.0, 5.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 5.0, 5.0, 3.0, 2.0, 4.0], t: -2.4256830771740279, df: 47.930405390105074, welch_p: 0.019094623479585037, u: 196.0, mw_p: 0.038407559608927033 },
    StatsCase { a: &[-1.607, -2.26, 1.299, -0.407, -1.646, -0.373, -0.316], b: &[-3.365, 1.513, -1.468, -1.611, -1.527, -0.587, -3.415, -0.882, -0.02, 0.605, -0.231, -1.191, 0.117, 1.42, 1.175, 0.322, -2.826, -0.404, -0.982, -0.539, 1.899, 0.635, 0.194, 0.089], t: -0.55431481928706856, df: 11.623370133344051, welch_p: 0.58986950193872069, u: 66.0, mw_p: 0.40835196932593826 },
    StatsCase { a: &[4.0, 5.0, 2.0, 3.0, 4.0, 5.0, 3.0, 4.0, 5.0, 4.0, 5.0, 4.0, 5.0, 4.0, 4.0], b: &[3.0, 3.0, 1.0, 5.0, 2.0, 4.0, 5.0, 4.0, 4.0, 4.0, 3.0, 4.0, 2.0, 4.0, 3.0, 4.0, 3.0, 4.0, 1.0, 4.0, 3.0, 2.0], t: 2.4033663141210708, df: 34.154315503504843, welch_p: 0.02181950081528485, u: 233.0, mw_p: 0.027863856548537489 },
    StatsCase { a: &[-0.02, -0.069, 0.366, 2.322, 0.457, -0.646, -0.72, -1.115, -0.48, -0.539, -0.499, 0.483, -2.3, -1.22, -0.067, -1.871, -1.785, -1.64, -0.797, -0.317, 0.998], b: &[1.025, 1.76, 2.913, 3.802, 2.431], t: -5.359325269487395, df: 6.0537852488428113, welch_p: 0.0016810396795655252, u: 2.0, mw_p: 0.0011419339946098815 },
];
