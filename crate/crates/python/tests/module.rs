use pyo3::ffi::c_str;
use pyo3::prelude::*;

use ed3py::ed3py;

#[test]
fn module_functions_from_python() {
    pyo3::append_to_inittab!(ed3py);
    Python::attach(|py| {
        let code = c_str!(
            r#"
import json, math
import ed3py

e1, e2, h = ed3py.field_at("static", [], (5.0, 3.0, 4.0), charge=2.0)
assert abs(e1 - 0.24) < 1e-9 and abs(e2 - 0.32) < 1e-9 and abs(h) < 1e-12

g = 1.0 / math.sqrt(1.0 - 0.36)
e1, e2, h = ed3py.field_at("uniform", [0.6, 0.0], (0.0, 0.0, 2.0))
assert abs(e2 - g / 2.0) < 1e-8 and abs(e1) < 1e-8 and abs(h - 0.6 * g / 2.0) < 1e-8

run = ed3py.simulate(1.0, 1.0, 1.0, 1e-3, 1.0, selfforce=False)
assert run["error"] is None and abs(run["u"][-1][1] - math.sinh(1.0)) < 1e-6

run = ed3py.simulate(1.0, 1.0, 1.0, 1e-2, 2.0, tau_off=2.0)
assert run["error"] is not None and run["tau"][-1] < 2.0

passed, report = ed3py.validate("uniform")
assert passed and all(c["passed"] for c in json.loads(report)["checks"])

for bad in (lambda: ed3py.validate("nope"), lambda: ed3py.field_at("uniform", [1.2, 0.0], (0.0, 1.0, 0.0))):
    try:
        bad()
    except ValueError:
        pass
    else:
        raise AssertionError("accepted bad input")
"#
        );
        py.run(code, None, None).unwrap();
    });
}
