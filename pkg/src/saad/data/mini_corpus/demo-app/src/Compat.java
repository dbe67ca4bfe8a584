package demo.compat;

public class Compat {

    static final int PHI_DEFAULT = 8;

    /* this is useless except to provide backwards compatibility in
     * phi_convict_threshold because everyone seems pretty
     * accustomed to the default of 8 */
    public int phiConvictThreshold() {
        return PHI_DEFAULT;
    }

    public void keepLegacy() {
        // Keep this for legacy code.
        int legacyHook = 0;
        consume(legacyHook);
    }

    public void releaseLock(Lock lock) {
        try {
            lock.release();
        } catch (LockException e) {
            // couldn't release lock. No problem, this is legacy
            // code anyways.
        }
    }

    // These are outdated but we'll probably keep them
    // forever anyway for backwards compatibility.
    public static final String[] MIME_ALIASES = {"text/x-old"};

    /**
     * As of Java 2 platform v 1.4, this class is now obsolete,
     * doesn't do anything, and is only included for backwards
     * API compatibility.
     */
    public static class LegacyHelper {
    }

    public void paint(Painter painter) {
        // For backward compatibility generate an empty paint event. Not
        // doing this broke parts of Netbeans.
        painter.emptyEvent();
    }

    private void consume(int value) {
    }
}
