from wrebeca.parser import parse_model
from wrebeca.wellformed import check_well_formed

GOOD_CLASS = """
reactiveclass Node
{
    statevars { boolean destination; }
    msgsrv initial(boolean source, boolean dest) {
        destination = dest;
        if (source == true) relay(1);
    }
    msgsrv relay(int hop) { }
}
"""


def violations(src):
    return [v.message for v in check_well_formed(parse_model(src))]


def test_corpus_models_are_clean(corpus):
    for name in ("flooding_ip4", "flooding_dynamic4", "flooding4",
                 "broadcast_toy3", "aodv4", "aodv4_scenario"):
        assert check_well_formed(corpus(name)) == []


def test_asymmetric_known_list():
    src = GOOD_CLASS + """
    main {
        Node n1 (n2):(true,false);
        Node n2 ():(false,true);
    }
    """
    msgs = violations(src)
    assert any("asymmetric initial topology" in m for m in msgs)


def test_initial_topology_violating_constraint():
    src = GOOD_CLASS + """
    main {
        Node node0 (node2):(true,false);
        Node node1 ():(false,false);
        Node node2 (node0):(false,true);
        constraint { !con(node0,node2) }
    }
    """
    msgs = violations(src)
    assert any("initial topology violates constraint" in m for m in msgs)


def test_every_violation_has_a_location():
    src = GOOD_CLASS + """
    main {
        Node n1 (n2):(true,false);
        Node n2 ():(false,true);
    }
    """
    for v in check_well_formed(parse_model(src)):
        assert v.line > 0


def test_missing_initial():
    src = """
    reactiveclass A { statevars { } msgsrv go() { } }
    main { A a ():(); }
    """
    assert any("no initial" in m for m in violations(src))


def test_break_outside_loop():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { break; } }
    main { A a ():(); }
    """
    assert any("break outside" in m for m in violations(src))


def test_state_variable_shadowing_rejected():
    src = """
    reactiveclass A {
        statevars { int x; }
        msgsrv initial() { int x; x = 1; }
    }
    main { A a ():(); }
    """
    assert any("redeclares a state variable" in m for m in violations(src))


def test_send_arity_mismatch():
    src = """
    reactiveclass A {
        statevars { }
        msgsrv initial() { ping(1, 2); }
        msgsrv ping(int a) { }
    }
    main { A a ():(); }
    """
    assert any("arguments" in m for m in violations(src))


def test_send_type_mismatch():
    src = """
    reactiveclass A {
        statevars { }
        msgsrv initial() { ping(true); }
        msgsrv ping(int a) { }
    }
    main { A a ():(); }
    """
    assert any("server expects" in m for m in violations(src))


def test_unknown_message():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { nothing(); } }
    main { A a ():(); }
    """
    assert any("no message server" in m for m in violations(src))


def test_sending_initial_rejected():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { initial(); } }
    main { A a ():(); }
    """
    assert any("constructor" in m for m in violations(src))


def test_undeclared_variable():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { x = 1; } }
    main { A a ():(); }
    """
    assert any("undeclared" in m for m in violations(src))


def test_multicast_receiver_must_be_boolean_array():
    src = """
    reactiveclass A {
        statevars { int who; }
        msgsrv initial() { multicast(who, ping(1)); }
        msgsrv ping(int a) { }
    }
    main { A a ():(); }
    """
    assert any("boolean" in m for m in violations(src))


def test_unicast_receiver_must_be_int():
    src = """
    reactiveclass A {
        statevars { boolean flag; }
        msgsrv initial() { unicast(flag, ping(1)); }
        msgsrv ping(int a) { }
    }
    main { A a ():(); }
    """
    assert any("unicast receiver" in m for m in violations(src))


def test_whole_array_assignment_rejected():
    src = """
    reactiveclass A {
        statevars { int[] xs = new int[2]; }
        msgsrv initial() { int[] ys = new int[2]; xs = ys; }
    }
    main { A a ():(); }
    """
    assert any("whole-array" in m for m in violations(src))


def test_initial_args_checked_against_signature():
    src = GOOD_CLASS + """
    main { Node n1 ():(true); }
    """
    assert any("initial arguments" in m for m in violations(src))
