package demo.lifecycle;

import java.util.List;

public class Lifecycle {

    // Obsoleted method which does nothing.
    public void obsoletedHook() {
    }

    public void flushCaches() {
        // this should be deprecated - jcs
        clearAll();
    }

    // Object[] and List are outdated and may be deprecated some day
    public Object[] toArray(List<Object> items) {
        return items.toArray();
    }

    // everything below is deprecated

    public void emitEvents() {
        // deprecated method
        fireLegacyEvent();
    }

    public void pruneDeadBranches() {
        // This really should be deadcode.
        int unreachable = -1;
        consume(unreachable);
    }

    public void compactStorage() {
        // I think this method can be removed in future versions of JBP.
        mergeSegments();
    }

    // This property will be removed in a later release.
    public static final String STORAGE_MODE = "compact";

    /**
     * @deprecated use newMethod() instead
     */
    public void oldMethod() {
    }

    public boolean checkSourceUri(String uri) {
        if (!uri.endsWith(".jar")) {
            // the maven plugin is putting some useless source url sometimes...
            return false;
        }
        return true;
    }

    /** Users can create a
     * mechanism for managing this, or relinquish the use of "=="
     * and use the .sameNodeAs() mechanism, which is under
     * consideration for future versions of the DOM. */
    public boolean sameNodeAs(Object other) {
        return this == other;
    }

    private void clearAll() {
    }

    private void fireLegacyEvent() {
    }

    private void mergeSegments() {
    }

    private void consume(int value) {
    }
}
