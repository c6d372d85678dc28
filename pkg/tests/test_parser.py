import pytest

from wrebeca.errors import ParseError
from wrebeca.parser import parse_constraint, parse_model
from wrebeca.syntax import ConAnd, ConLink, ConTrue, format_model


def test_flooding_ip_shape(corpus):
    m = corpus("flooding_ip4")
    assert len(m.classes) == 1
    assert [s.name for s in m.classes[0].msgsrvs] == [
        "initial", "relay_packet", "deliver_packet"]
    assert len(m.rebecs) == 4
    c = m.constraint
    assert isinstance(c, ConAnd)
    assert c.left == ConLink("node0", "node1", False)
    assert c.right == ConLink("node0", "node2", True)


def test_aodv_msgsrvs(corpus):
    m = corpus("aodv4")
    names = [s.name for s in m.classes[0].msgsrvs]
    assert names == ["initial", "rec_rreq", "rec_rrep", "rec_rerr",
                     "rec_newpkt", "resend_rreq"]


def test_empty_main_is_syntax_error():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { } }
    main { }
    """
    with pytest.raises(ParseError) as err:
        parse_model(src)
    assert err.value.line > 0


def test_unknown_known_rebec_is_parse_error():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { } }
    main { A x (ghost):(); }
    """
    with pytest.raises(ParseError, match="ghost"):
        parse_model(src)


def test_unknown_constraint_name():
    src = """
    reactiveclass A { statevars { } msgsrv initial() { } }
    main { A x ():(); A y ():(); constraint { con(x,z) } }
    """
    with pytest.raises(ParseError, match="z"):
        parse_model(src)


def test_missing_constraint_defaults_to_true(corpus):
    m = corpus("flooding_dynamic4")
    assert isinstance(m.constraint, ConTrue)


def test_empty_known_list_rows_disconnected(corpus):
    m = corpus("broadcast_toy3")
    topo = m.initial_topology
    assert not topo.connected(0, 2) and not topo.connected(1, 2)
    assert topo.connected(0, 1)
    assert topo.connected(2, 2)  # diagonal stays true


ALL_CORPUS = ["flooding_ip4", "flooding_dynamic4", "flooding3", "flooding4",
              "flooding5", "flooding6", "broadcast_toy3", "aodv4",
              "aodv4_scenario"]


@pytest.mark.parametrize("name", ALL_CORPUS)
def test_pretty_print_round_trip(corpus, name):
    m = corpus(name)
    assert parse_model(format_model(m)) == m


def test_identifiers_follow_declaration_order(corpus):
    m = corpus("aodv4")
    assert m.rebec_names == ("node0", "node1", "node2", "node3")
    assert [m.rebec_id(n) for n in m.rebec_names] == [0, 1, 2, 3]
    again = parse_model(format_model(m))
    assert again.rebec_names == m.rebec_names


def test_syntax_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_model("reactiveclass X {")
    assert err.value.line == 1 and err.value.col >= 1


def test_for_loop_desugars_to_scoped_while():
    src = """
    reactiveclass A {
        statevars { int total; }
        msgsrv initial() {
            for (int i = 0; i < 3; i++) { total = total + i; }
            for (int i = 0; i < 2; i++) { total = total + 1; }
        }
    }
    main { A a ():(); }
    """
    m = parse_model(src)
    text = format_model(m)
    assert "while" in text and "for" not in text
    assert parse_model(text) == m


def test_parse_constraint_helper(corpus):
    m = corpus("flooding_dynamic4")
    c = parse_constraint("and(con(node0,node1),!con(node0,node2))", m)
    assert isinstance(c, ConAnd)
    with pytest.raises(ParseError):
        parse_constraint("con(node0,nodeX)", m)
    with pytest.raises(ParseError):
        parse_constraint("or(con(node0,node1),true)", m)


def test_unicast_without_blocks_is_sugar():
    src = """
    reactiveclass A {
        statevars { }
        msgsrv initial() { unicast(self, ping()); }
        msgsrv ping() { }
    }
    main { A a ():(); }
    """
    m = parse_model(src)
    uni = m.classes[0].msgsrvs[0].body[0]
    assert uni.succ is None and uni.unsucc is None
