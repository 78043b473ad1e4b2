"""Shared report fixtures: the three motivating examples plus 30 synthetic
classifier cases (10 per category, including ST-precedence mixes)."""

from faultline.reports import BugReport, Category, parse_timestamp


def make_report(report_id, title, description, created="2021-06-01T00:00:00Z",
                fixed=("Some.java",), project="demo", version="1.0"):
    return BugReport(
        report_id=report_id,
        project=project,
        version=version,
        title=title,
        description=description,
        created_at=parse_timestamp(created),
        fixed_files=tuple(fixed),
    )


COMPRESS_357 = make_report(
    "COMPRESS-357",
    "BZip2CompressorOutputStream can affect output stream incorrectly",
    "BZip2CompressorOutputStream has an unsynchronized finished() method, "
    "and an unsynchronized finalize method. Finish checks to see if the "
    "output stream is null, and if it is not, it calls various methods, "
    "some of which write to the output stream. Now, consider something like "
    "this sequence. BZip2OutputStream s = ... s.close(); s = null; After "
    "the s = null, the stream is garbage. At some point the garbage "
    "collector call finalize(), which calls finish().",
)

CAMEL_620 = make_report(
    "CAMEL-620",
    "ResequencerType.createProcessor could throw NPE as stream config does "
    "not get initialized.",
    "java.lang.NullPointerException\n"
    "at org.apache.camel.model.ResequencerType.createProcessor(ResequencerType.java:163)\n"
    "at org.apache.camel.model.ProcessorType.createOutputsProcessor(ProcessorType.java:584)\n"
    "at org.apache.camel.model.ProcessorType.createOutputsProcessor(ProcessorType.java:93)",
)

CAMEL_2320 = make_report(
    "CAMEL-2320",
    "JDBC component doesn't preserve headers",
    "JDBC component doesn't preserve any of the headers that are sent into it",
)

TABLE1 = {
    "COMPRESS-357": (COMPRESS_357, Category.PE),
    "CAMEL-620": (CAMEL_620, Category.ST),
    "CAMEL-2320": (CAMEL_2320, Category.NL),
}

_PE_CASES = [
    ("CacheManager returns stale entries",
     "The CacheManager keeps serving old values after eviction."),
    ("Crash when flushing",
     "Calling flushBuffers() twice in a row crashes the writer."),
    ("Bug in ParserUtil.java",
     "ParserUtil.java mishandles byte order markers at the top of a file."),
    ("Memory leak in the cache package",
     "Objects from com.acme.cache are never collected after a clear."),
    ("getUserName returns null",
     "After login getUserName gives null for guest accounts."),
    ("Wrong sort order for equal keys",
     "The comparator in TreeNodeWalker flips entries with equal keys."),
    ("Polling timeout too short",
     "HttpPoller gives up after one second regardless of the setting."),
    ("Encoding bug in the writer",
     "writeUtf8 truncates four byte characters at buffer boundaries."),
    ("Parallelism flag ignored",
     "The flag maxParallelJobs is parsed but never applied."),
    ("Listener leak on unsubscribe",
     "EventBus keeps AsyncListener instances after unsubscribe."),
]

_ST_CASES = [
    ("Crash opening a project",
     "java.lang.NullPointerException\n"
     "at com.acme.ide.ProjectLoader.open(ProjectLoader.java:101)\n"
     "at com.acme.ide.Workbench.start(Workbench.java:55)"),
    ("Error during export",
     "at com.acme.export.SheetWriter.flush(SheetWriter.java:10)"),
    ("Stream already closed",
     "org.acme.io.StreamClosedException: already closed"),
    ("Startup failure after upgrade",
     "java.lang.IllegalStateException: container not started\n"
     "at com.acme.boot.Container.require(Container.java:77)\n"
     "Caused by: java.io.IOException: port in use\n"
     "at com.acme.net.PortBinder.bind(PortBinder.java:31)"),
    ("Native crash in the codec",
     "at com.acme.codec.Jni.transcode(Native Method)"),
    # Precedence: entities AND a trace -> still ST.
    ("FrameGrabber drops frames",
     "FrameGrabber.grab() loses every second frame.\n"
     "at com.acme.video.FrameGrabber.grab(FrameGrabber.java:203)"),
    ("Bad argument from the scheduler",
     "java.lang.IllegalArgumentException: negative delay\n"
     "at com.acme.cron.Scheduler.schedule(Scheduler.java:44)\n"
     "at com.acme.cron.CronDaemon.tick(CronDaemon.java:12)"),
    ("Lookup fails in nested registries",
     "at org.acme.platform.core.registry.RegistryNode.lookup(RegistryNode.java:450)"),
    ("Constructor blows up on null config",
     "at com.acme.cfg.Widget.<init>(Widget.java:5)"),
    ("Out of memory while indexing",
     "java.lang.OutOfMemoryError: Java heap space\n"
     "at com.acme.index.Segment.grow(Segment.java:88)"),
]

_NL_CASES = [
    ("Report page is blank",
     "The report page is blank after midnight until the next refresh."),
    ("Saving twice creates duplicates",
     "Pressing save twice quickly creates two copies of the record."),
    ("Export is slow",
     "Exporting a large project takes hours where it used to take minutes."),
    ("UI freezes while scrolling",
     "The UI freezes when scrolling fast through long result lists."),
    ("Updater loops",
     "Version 2.5.1 keeps asking for the same update after installing it."),
    ("Printing fails with empty tray",
     "Printing fails e.g. when the tray is empty, with no message shown."),
    ("Search misses accented words",
     "Search finds nothing for words with accents although they exist."),
    ("Digest arrives twice",
     "The weekly digest arrives twice on Mondays for some subscribers."),
    ("Uploads hang behind proxy",
     "Uploads hang forever behind the corporate proxy but work at home."),
    ("Deleting a tag leaves orphans",
     "Deleting a tag leaves orphaned labels visible in old filters."),
]


def synthetic_cases():
    """30 (report, expected category) pairs, 10 per category."""
    cases = []
    for i, (title, desc) in enumerate(_PE_CASES, 1):
        cases.append((make_report(f"SYN-PE-{i}", title, desc), Category.PE))
    for i, (title, desc) in enumerate(_ST_CASES, 1):
        cases.append((make_report(f"SYN-ST-{i}", title, desc), Category.ST))
    for i, (title, desc) in enumerate(_NL_CASES, 1):
        cases.append((make_report(f"SYN-NL-{i}", title, desc), Category.NL))
    return cases
