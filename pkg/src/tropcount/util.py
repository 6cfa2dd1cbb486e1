from __future__ import annotations

import collections.abc
import concurrent.futures
import functools
import inspect
import multiprocessing
import typing

import outcome
import trio


class AlreadyFinalizedError(Exception):
    pass


class Future[V]:
    _outcome: typing.Optional[outcome.Outcome]

    def __init__(self):
        self._event = trio.Event()
        self._outcome = None

    def finalize(self, result: V | outcome.Outcome[V]):
        if self._outcome is not None:
            raise AlreadyFinalizedError()
        if isinstance(result, outcome.Outcome):
            self._outcome = result
        else:
            self._outcome = outcome.Value(result)
        self._event.set()

    async def wait(self) -> V:
        await self._event.wait()
        return self._outcome.unwrap()

    @property
    def is_final(self):
        return self._event.is_set()


async def map_in_processes[T, V](func: collections.abc.Callable[[T], V], items: typing.Iterable[T], jobs: int = 1) -> list[V]:
    """Run func over items in worker processes, at most `jobs` at a time.

    func and the items must pickle. With a single job everything runs in one worker thread of this process instead.
    Results come back in input order whatever order the workers finish in. The first worker error in input order is
    re-raised once every worker has stopped.
    """
    if jobs < 1:
        raise ValueError(f"need at least one job, got {jobs}")
    items = list(items)
    if jobs == 1 or len(items) < 2:
        return await trio.to_thread.run_sync(functools.partial(_map_serially, func, items))
    limiter = trio.CapacityLimiter(jobs)
    futures: list[Future[V]] = []
    context = multiprocessing.get_context("spawn")
    with concurrent.futures.ProcessPoolExecutor(max_workers=min(jobs, len(items)), mp_context=context) as executor:

        async def worker(item: T, future: Future[V]):
            submitted = executor.submit(func, item)
            result = await outcome.acapture(functools.partial(trio.to_thread.run_sync, submitted.result, limiter=limiter))
            future.finalize(result)

        async with trio.open_nursery() as nursery:
            for item in items:
                future = Future()
                futures.append(future)
                nursery.start_soon(worker, item, future)
    return [await f.wait() for f in futures]


def _map_serially[T, V](func: collections.abc.Callable[[T], V], items: list[T]) -> list[V]:
    return [func(item) for item in items]


def invoke(c: typing.Callable, **provided_kwargs):
    """Call c with whichever of the provided keyword arguments it declares."""
    sig = inspect.signature(c)
    used_kwargs = {k: v for k, v in provided_kwargs.items() if k in sig.parameters}
    return c(**used_kwargs)
