from fractions import Fraction

import pytest

from mbsched.domain import (INF_PT_MAX, INF_PT_MIN, NS_PER_S, CostModelState, Dataset, Device,
                            InvalidArgument, OperationNode, OpKind, PlanError, QueryPlanDag,
                            WindowSpec, clamp_inf_pt, new_micro_batch, ns_to_str, seconds_to_ns,
                            split_partitions, str_to_ns)


def test_time_conversions_are_exact():
    assert seconds_to_ns(0.01) == 10_000_000
    assert seconds_to_ns("1.475e-3") == 1_475_000
    assert seconds_to_ns(Fraction(1, 3)) == 333_333_333
    assert ns_to_str(1_475_000) == "0.001475000"
    assert ns_to_str(-5) == "-0.000000005"
    for ns in (0, 1, 999_999_999, 12_345_678_901_234):
        assert str_to_ns(ns_to_str(ns)) == ns


def test_dataset_validation():
    with pytest.raises(InvalidArgument):
        Dataset(0, 0, 0)
    with pytest.raises(InvalidArgument):
        Dataset(0, 1, -1)
    assert Dataset(3, 10, 2 * NS_PER_S).ingest_time == 2


def test_window_spec():
    assert WindowSpec(30, 0).tumbling
    assert WindowSpec(30, 5).slide_ns == 5 * NS_PER_S
    with pytest.raises(InvalidArgument):
        WindowSpec(5, 10)
    with pytest.raises(InvalidArgument):
        WindowSpec(0, 0)


def test_split_partitions_conserves_bytes():
    assert split_partitions(25, 12) == [3] + [2] * 11
    assert sum(split_partitions(10**9 + 7, 12)) == 10**9 + 7
    assert split_partitions(5, 12).count(0) == 7


def test_micro_batch_orders_and_measures():
    ds = [Dataset(2, 10, 2 * NS_PER_S), Dataset(1, 5, NS_PER_S)]
    b = new_micro_batch(ds, 4, 3 * NS_PER_S, index=7)
    assert [d.id for d in b.datasets] == [1, 2]
    assert b.total_bytes == 15 and sum(b.partitions) == 15
    assert b.max_buff_ns == 2 * NS_PER_S
    with pytest.raises(InvalidArgument):
        new_micro_batch([], 4, 0)


def test_dag_traversal_and_errors():
    dag = QueryPlanDag((OperationNode(OpKind.SCAN), OperationNode(OpKind.PROJECT, (0,)),
                        OperationNode(OpKind.PROJECT, (0,)),
                        OperationNode(OpKind.HASH_JOIN, (1, 2))))
    assert dag.traverse() == [0, 1, 2, 3]
    assert dag.leaves() == [0] and dag.root() == 3
    with pytest.raises(PlanError):
        QueryPlanDag((OperationNode(OpKind.SCAN, (1,)), OperationNode(OpKind.SCAN, (0,)),
                      OperationNode(OpKind.SORT, (0,)))).traverse()
    with pytest.raises(PlanError):
        QueryPlanDag((OperationNode(OpKind.SCAN), OperationNode(OpKind.SCAN))).root()
    with pytest.raises(InvalidArgument):
        OperationNode(OpKind.SCAN, base_cost=Fraction(0))


def test_summary_string_and_counts():
    dag = QueryPlanDag((OperationNode(OpKind.SCAN), OperationNode(OpKind.FILTER, (0,))))
    planned = dag.with_assignment({0: Device.GPU, 1: Device.CPU})
    assert planned.summary() == "Scan:GPU;Filter:CPU"
    assert planned.count(Device.CPU) == 1


def test_inf_pt_clamp():
    assert clamp_inf_pt(-5000) == INF_PT_MIN
    assert clamp_inf_pt(10**12) == INF_PT_MAX
    s = CostModelState(inf_pt_bytes=1)
    assert s.inf_pt_bytes == INF_PT_MIN
    s.set_inf_pt(200_000.4)
    assert s.inf_pt_bytes == 200_000
