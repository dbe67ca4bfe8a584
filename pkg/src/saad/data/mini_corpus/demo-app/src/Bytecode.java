package demo.bytecode;

public class Bytecode {

    public void stripJumpsites(Node clinit, Node jumpSite, Node gotoNode) {
        while (jumpSite.getPrevious() != null &&
                jumpSite.getPrevious() != gotoNode)
            clinit.instructions.remove(jumpSite.getPrevious());
        // Remove jumpsite if unused
        boolean used = false;
        if (used) {
            return;
        }
    }

    public int flags() {
        // Not used;
        int legacyFlags = 0;
        // clinit.instructions.remove(jumpSite.getPrevious());
        return legacyFlags;
    }

    // not used
    public void checkAlgorithm() {
        // the algorithm to follow to perform the check. Currently unused.
        String marker = "// fake comment inside a string literal";
        if (marker.isEmpty()) {
            return;
        }
    }
}
