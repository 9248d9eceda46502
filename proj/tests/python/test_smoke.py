import sqgroups as sq


def test_registry():
    names = sq.registry_names()
    assert "znil" in names and "zq" in names and "z2t" in names
    assert set(sq.sigma_names()) <= set(names)


def test_validate_and_invariants():
    for name in sq.registry_names():
        assert sq.validate(name)["ok"], name
    inv = sq.invariants("znil")
    assert inv["T"] == "[[-1]]"
    assert inv["k_nonzero"] is True
    assert inv["sg_sigma"] is True
    assert sq.invariants("zq")["sg_sigma"] is False


def test_tensor_classical():
    t = sq.tensor("ab_z4", "ab_z6")
    assert t["e_ab"] == [2]
    assert t["ee"] == []
    assert t["valid"] and t["relations_ok"]


def test_homotopy_znil():
    pis = sq.homotopy("znil", 3)
    assert pis == [[0], [2], [], [2]]  # Z, Z/2, 0, Z/2


def test_tor1():
    t = sq.tor1([2], "z4t")
    assert t["e_ab"] == [2, 2]


def test_coherence():
    assert sq.pentagon("znil", "znil", "znil", "znil")
    assert sq.triangle("z2t", "ab_z3")


def test_box_and_sigma():
    b = sq.box("znil", "znil")
    assert b["valid"] and b["sigma_iso"]
    assert not sq.box("zq", "zq")["sigma_iso"]


def test_rings():
    r = sq.ring_validate("znil")
    assert r["qring_ok"] and r["commutative"] and r["sqring_ok"]
    assert not sq.ring_validate("lz3")["commutative"]
    psi = sq.psi_values("znil")
    assert psi["codomain"] == [2] and psi["psi_of_two_nonzero"] and psi["laws_ok"]


def test_cosym():
    out = sq.cosym_roundtrip("znil_st")
    assert out["sg_sigma"] and out["roundtrip_ok"]


def test_document():
    text = "abelian A = [4]\nabelian B = [6]\nsquare M = from_abelian A\nsquare N = from_abelian B\n"
    rep = sq.run_document(text, ["tensor", "M", "N"])
    assert rep["ok"]
    assert any("Z/2" in c["name"] for c in rep["checks"])
