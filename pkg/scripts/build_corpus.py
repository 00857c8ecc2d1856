"""Write the example object files used by the CLI tests and the README."""

import json
import sys
from pathlib import Path

from o2models import formats
from o2models.burnside import e_cyclic, e_dihedral, e_n, f_n, restrict
from o2models.euler_of import (
    AdmissibleRep, EulerClass, FpModule, ModuleElement, OFElement, O_F, Presentation, localize,
    rep_sphere_module,
)
from o2models.exactlin import ChainCx, GradedVec, Mat, Ring, WVec
from o2models.germ import Germ
from o2models.model_c import sphere_c
from o2models.model_d import cq, hom_ext, i_k, regular_stalk
from o2models.model_t import (
    Vertex, WideSphereData, e_torsion, identity, sphere, unit, wide_sphere,
)


def corpus() -> dict:
    v = EulerClass.of({2: 1, 3: 2})
    torsion = FpModule(O_F, Germ({2: Presentation(Ring.POLY, (0,), (-2,), Mat([[1]]))},
                                 Presentation.zero(Ring.POLY)))
    s = sphere(EulerClass.of({2: 1}))
    wide = WideSphereData((EulerClass.of({2: 1}), EulerClass.of({3: 1})),
                          (OFElement.scalar(1), OFElement.scalar(-1)))
    cx = ChainCx(GradedVec({0: 2, 1: 1}), {1: Mat([[1], [0]])})
    return {
        "burnside_e_cyclic": e_cyclic(),
        "burnside_mixed": e_dihedral() + e_n(3).scale(2) - f_n(2),
        "dihedral_burnside_6": restrict(e_cyclic() + e_n(2), 6),
        "euler_class": v,
        "admissible_rep": AdmissibleRep((1, 2, 2)),
        "of_element": OFElement.scalar(3),
        "presentation_torsion": Presentation(Ring.POLY, (0,), (-4,), Mat([[1]])),
        "fp_module_sphere": rep_sphere_module(AdmissibleRep((1, 2))),
        "fp_module_localized": localize(rep_sphere_module(AdmissibleRep((2,)))),
        "module_element": ModuleElement(s.nub, 0, Germ({}, (1,))),
        "vertex": Vertex((0, 2), (1, -1)),
        "t_sphere": s,
        "t_unit": unit(),
        "t_torsion": e_torsion(torsion),
        "t_wide_sphere": wide_sphere(wide),
        "t_map_identity": identity(s),
        "c_sphere": sphere_c(EulerClass.of({2: 1}), -1),
        "wide_sphere_data": wide,
        "graded_vec": GradedVec({-1: 1, 0: 3}),
        "w_vec": WVec(GradedVec({0: 1}), GradedVec({0: 2})),
        "chain_complex": cx,
        "w_chain_complex": regular_stalk(2),
        "d_cq": cq(),
        "d_ik": i_k(3, regular_stalk(2)),
        "section_space": hom_ext(cq(), cq(), (-1, 0, 1)).hom,
    }


def bad_files() -> dict:
    """Files that must be rejected: one mathematically, one syntactically."""
    beta_zero = formats.encode(sphere(EulerClass.of({2: 1})))
    beta_zero["beta"]["generic"]["rows"] = [["0/1"]]
    return {"bad_beta.json": json.dumps(beta_zero, indent=2) + "\n",
            "malformed.json": '{"kind": "graded_vec", "dims": {"0": 1,}\n'}


def main(root: str) -> None:
    out = Path(root)
    (out / "bad").mkdir(parents=True, exist_ok=True)
    for name, obj in corpus().items():
        (out / f"{name}.json").write_text(formats.dumps(obj))
    for name, text in bad_files().items():
        (out / "bad" / name).write_text(text)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "corpus")
